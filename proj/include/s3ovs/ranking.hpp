#pragma once

#include <string>
#include <vector>

#include "s3ovs/matrix.hpp"

namespace s3ovs {

struct RankTable {
    std::vector<std::string> datasets;  // row labels
    std::vector<std::string> methods;   // column labels
    Matrix scores;                      // datasets x methods
    Matrix ranks;                       // 1 = best, ties share the average rank
    std::vector<double> mean_ranks;     // per method
};

RankTable mean_ranks(const std::vector<std::string>& datasets,
                     const std::vector<std::string>& methods, const Matrix& scores,
                     bool higher_is_better);

struct FriedmanResult {
    double chi2 = 0.0;
    double f_value = 0.0;  // Iman-Davenport statistic
    double critical_f = 0.0;
    int df1 = 0;
    int df2 = 0;
    double alpha = 0.05;
    bool reject = false;
    bool degenerate = false;  // chi2 hit N(k-1); f_value reported infinite
};

// Friedman chi-square over the table's mean ranks plus the Iman-Davenport
// F correction, compared against the F quantile at 1 - alpha with degrees of
// freedom (k-1, (k-1)(N-1)).
FriedmanResult friedman_test(const RankTable& table, double alpha = 0.05);

}  // namespace s3ovs
