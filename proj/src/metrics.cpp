#include "s3ovs/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace s3ovs {

MetricsReport metrics(std::span<const int> y_true, std::span<const int> y_pred,
                      int positive_class) {
    if (y_true.empty()) throw std::invalid_argument("metrics: empty input");
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("metrics: length mismatch");
    if (positive_class != -1 && positive_class != +1)
        throw std::invalid_argument("metrics: positive class must be -1 or +1");

    MetricsReport r;
    r.positive_class = positive_class;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool actual_pos = y_true[i] == positive_class;
        const bool predicted_pos = y_pred[i] == positive_class;
        if (actual_pos && predicted_pos) ++r.tp;
        else if (actual_pos) ++r.fn;
        else if (predicted_pos) ++r.fp;
        else ++r.tn;
    }

    const long n = static_cast<long>(y_true.size());
    r.acc = static_cast<double>(r.tp + r.tn) / static_cast<double>(n);
    if (r.tp + r.fn > 0) {
        r.s_pos = static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
    } else {
        r.s_pos = 1.0;
        r.s_pos_vacuous = true;
    }
    if (r.tn + r.fp > 0) {
        r.s_neg = static_cast<double>(r.tn) / static_cast<double>(r.tn + r.fp);
    } else {
        r.s_neg = 1.0;
        r.s_neg_vacuous = true;
    }
    r.macc = 0.5 * (r.s_pos + r.s_neg);
    r.gm = std::sqrt(r.s_pos * r.s_neg);
    return r;
}

}  // namespace s3ovs
