#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "roid/tensor.hpp"
#include "roid/types.hpp"

namespace roid {

/// Relative square error ||x - reference||_F / ||reference||_F.
double rse(const DenseTensor3& x, const DenseTensor3& reference);

struct ScoredLabels {
    std::vector<double> scores;
    std::vector<int> labels;  // 0/1
};

/// ROC AUC as the Mann-Whitney statistic P(score+ > score-) + P(tie)/2;
/// ties are handled exactly via midranks.
double auc(const ScoredLabels& data);

/// COO text format: '#' comment lines, a "I1 I2 I3" header, then one
/// "i1 i2 i3 value" line per observation (1-based indices).
ObservationSet read_coo(const std::filesystem::path& path);
void write_coo(const std::filesystem::path& path, const ObservationSet& obs);

/// Dense text format: "I1 I2 I3" header, then I1*I2*I3 values in the
/// mode-1-unfolding column order. Lossless at 17 significant digits.
DenseTensor3 read_dense(const std::filesystem::path& path);
void write_dense(const std::filesystem::path& path, const DenseTensor3& t);

struct ResultRow {
    std::string method;
    Dims3 dims;
    Dims3 rank;
    double ratio = 1.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double rse = 0.0;
    double auc = std::numeric_limits<double>::quiet_NaN();
    int iters = 0;
    double seconds = 0.0;
    bool converged = true;
};

std::string results_csv_header();
std::string format_result_row(const ResultRow& row);
void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);

}  // namespace roid
