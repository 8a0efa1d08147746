#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "milkspec/core/matrix.hpp"
#include "milkspec/kernels/exec.hpp"

namespace milkspec {

enum class CorrelationMethod { pearson, spearman, kendall };

std::string to_string(CorrelationMethod m);
CorrelationMethod parse_correlation_method(std::string_view s);

struct CorrelationResult {
  CorrelationMethod method = CorrelationMethod::pearson;
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Throws std::invalid_argument for length mismatch or n < 3 and
/// DegenerateError when either input is constant.
CorrelationResult correlation(std::span<const double> x, std::span<const double> y, CorrelationMethod method);

/// Mid-ranks (1-based), ties get the average of their positions.
std::vector<double> mid_ranks(std::span<const double> v);

struct KendallCounts {
  double concordant_minus_discordant = 0.0;
  double pairs = 0.0;     // n(n−1)/2
  double x_ties = 0.0;    // pairs tied in x
  double y_ties = 0.0;    // pairs tied in y
  double joint_ties = 0.0;
  double discordant = 0.0;
};

/// O(n log n) pair statistics (sort on x, merge-sort inversions on y).
KendallCounts kendall_counts(std::span<const double> x, std::span<const double> y);

/// Two-sided exact p-value of Kendall's S for untied data, from the
/// distribution of inversion counts of a random permutation.
double kendall_exact_p(std::size_t n, std::size_t discordant);

enum class PCorrection { none, benjamini_hochberg };

std::string to_string(PCorrection c);
PCorrection parse_p_correction(std::string_view s);

/// Benjamini–Hochberg step-up adjusted p-values, in input order.
std::vector<double> benjamini_hochberg(std::span<const double> p);

struct BandSignificanceOptions {
  CorrelationMethod method = CorrelationMethod::pearson;
  double alpha = 0.05;
  PCorrection correction = PCorrection::none;
  Exec exec = Exec::parallel;
};

struct BandResult {
  std::size_t band = 0;
  std::optional<double> wavelength;
  double coefficient = 0.0;  // NaN for a constant band
  double p_value = 1.0;      // raw; NaN for a constant band
  double p_adjusted = 1.0;   // equals p_value when no correction applies
  bool significant = false;
  std::string diagnostic;    // empty unless the band was skipped
};

/// One correlation per band (column). Constant bands are reported as not
/// significant with a diagnostic instead of failing the table.
std::vector<BandResult> band_significance(const Matrix& spectra, std::span<const double> target,
                                          const BandSignificanceOptions& options,
                                          std::span<const double> wavelengths = {});

}  // namespace milkspec
