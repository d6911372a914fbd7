#pragma once

#include <span>
#include <vector>

namespace s3ovs {

struct MetricsReport {
    double acc = 0.0;
    double macc = 0.0;  // mean of the two sensitivities
    double gm = 0.0;    // geometric mean of the sensitivities
    double s_pos = 0.0;
    double s_neg = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
    int positive_class = +1;
    // A class absent from y_true gets sensitivity 1 by convention; the flag
    // records that the value is vacuous.
    bool s_pos_vacuous = false;
    bool s_neg_vacuous = false;
};

MetricsReport metrics(std::span<const int> y_true, std::span<const int> y_pred,
                      int positive_class);

}  // namespace s3ovs
