#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "combosim/bitstream.hpp"

namespace combosim {

/// Outcome of one statistical test on one sequence. Some tests produce two
/// p-values; `p_value` is then the smaller one and both appear in
/// `p_values`. `valid` distinguishes a prerequisite failure (test not
/// applicable) from a plain fail.
struct TestResult {
  std::string test_name;
  double p_value = 0.0;
  std::vector<double> p_values;
  bool pass = false;
  bool valid = true;
  std::string note;
};

/// Aggregate of one test across the sequences of a suite run.
struct TestSummary {
  std::string test_name;
  std::uint64_t sequences = 0;
  std::uint64_t pass_count = 0;
  std::uint64_t min_pass_count = 0;  ///< NIST proportion threshold (count)
  bool proportion_pass = false;
  double min_p = 1.0;
  double median_p = 0.0;
  double uniformity_p = 0.0;  ///< chi-square uniformity of the p-values
  std::vector<double> p_values;
};

struct SuiteParams {
  std::uint64_t seq_len = 1'000'000;
  double alpha = 0.01;
  int block_len = 128;     ///< block frequency
  int serial_m = 16;       ///< serial pattern length
  int apen_m = 10;         ///< approximate entropy pattern length
};

struct SuiteResult {
  SuiteParams params;
  std::uint64_t sequences = 0;
  std::vector<TestSummary> tests;
  bool all_pass = false;
};

/// Monobit frequency test: p = erfc(|sum(2x-1)| / sqrt(2n)).
TestResult test_frequency(const BitStream& bits, double alpha = 0.01);

/// Chi-square of per-block one-fractions.
TestResult test_block_frequency(const BitStream& bits, int block_len = 128,
                                double alpha = 0.01);

/// Total runs count against its expectation under the observed one-fraction.
/// Reports a distinct prerequisite failure when the monobit proportion is
/// off by more than 2/sqrt(n).
TestResult test_runs(const BitStream& bits, double alpha = 0.01);

enum class CusumMode { Forward, Backward };

/// Maximum partial-sum excursion of the +-1 walk.
TestResult test_cusum(const BitStream& bits, CusumMode mode = CusumMode::Forward,
                      double alpha = 0.01);

/// Overlapping m-bit pattern test; emits two p-values (nabla and
/// nabla-squared psi^2 statistics), both must pass.
TestResult test_serial(const BitStream& bits, int m = 16, double alpha = 0.01);

/// Approximate entropy ApEn(m) against ln 2.
TestResult test_approx_entropy(const BitStream& bits, int m = 10,
                               double alpha = 0.01);

/// Partitions the stream into sequences of seq_len bits, runs every
/// implemented test on each, and aggregates pass proportions against the
/// NIST threshold floor(m * (p - 3 sqrt(p(1-p)/m))), p = 1 - alpha.
SuiteResult run_suite(const BitStream& bits, const SuiteParams& params = {});

/// NIST proportion threshold as a minimum pass count.
std::uint64_t proportion_threshold(std::uint64_t sequences, double alpha);

enum class BitFileFormat { Ascii, Packed };

/// Writes a stream as '0'/'1' characters (ascii) or packed bytes, first bit
/// in the most significant position, zero-padded; the pad length goes to a
/// "<path>.meta" sidecar so the round trip is exact.
void export_bits(const BitStream& bits, BitFileFormat format,
                 const std::string& path);

BitStream import_bits(const std::string& path, BitFileFormat format,
                      StreamLabel label = StreamLabel::X);

}  // namespace combosim
