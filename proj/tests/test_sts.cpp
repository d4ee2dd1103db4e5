#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "combosim/numerics.hpp"
#include "combosim/predict.hpp"
#include "combosim/rng.hpp"
#include "combosim/sts.hpp"

using namespace combosim;

namespace {

BitStream constant(std::size_t n, bool v) {
  BitStream s(StreamLabel::X);
  for (std::size_t i = 0; i < n; ++i) s.append(v);
  return s;
}

BitStream alternating(std::size_t n) {
  BitStream s(StreamLabel::X);
  for (std::size_t i = 0; i < n; ++i) s.append(i % 2 == 1);
  return s;
}

BitStream pattern(std::size_t n, std::initializer_list<int> cycle) {
  BitStream s(StreamLabel::X);
  std::vector<int> c(cycle);
  for (std::size_t i = 0; i < n; ++i) s.append(c[i % c.size()] != 0);
  return s;
}

// Kolmogorov-Smirnov distance against Uniform[0,1].
double ks_uniform(std::vector<double> ps) {
  std::sort(ps.begin(), ps.end());
  const auto n = static_cast<double>(ps.size());
  double d = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, std::abs(ps[i] - lo), std::abs(ps[i] - hi)});
  }
  return d;
}

}  // namespace

TEST_CASE("gamma_q matches high-precision reference values") {
  // Reference values computed with 30-digit arithmetic (mpmath gammainc).
  const struct { double a, x, q; } cases[] = {
      {0.5, 0.25, 0.47950012218695346},
      {1.0, 1.0, 0.36787944117144232},
      {4.5, 2.0, 0.91141252683167917},
      {8.0, 8.0, 0.45296080948699449},
      {64.0, 60.0, 0.68043322453568184},
      {128.0, 140.0, 0.14492251808246529},
      {512.0, 480.0, 0.9236399391334299},
      {8192.0, 8192.0, 0.49853075529672123},
      {16384.0, 16250.0, 0.85248174952589236},
      {16384.0, 16900.0, 3.2719412205344984e-5},
      {32768.0, 33000.0, 0.1001918547785774},
      {512.0, 700.0, 3.7126088635587483e-14},
      {2.0, 30.0, 2.9008631203404541e-12},
  };
  for (const auto& c : cases) {
    CHECK(std::abs(gamma_q(c.a, c.x) - c.q) <= 1e-10 * c.q);
    CHECK(std::abs(gamma_p(c.a, c.x) - (1.0 - c.q)) <= 1e-10);
  }
  CHECK(gamma_q(5.0, 0.0) == 1.0);
}

TEST_CASE("erfc matches high-precision reference values") {
  const struct { double x, v; } cases[] = {
      {0.1, 0.8875370839817151},   {0.5, 0.47950012218695346},
      {1.0, 0.15729920705028513},  {2.0, 0.0046777349810472658},
      {3.5, 7.4309837234141275e-7},{5.0, 1.5374597944280349e-12},
      {8.0, 1.1224297172982927e-29},
  };
  for (const auto& c : cases)
    CHECK(std::abs(std::erfc(c.x) - c.v) <= 1e-10 * c.v);
}

TEST_CASE("frequency test: balanced, constant and nominal behavior") {
  CHECK(test_frequency(alternating(1000)).p_value == doctest::Approx(1.0));
  const auto all_ones = test_frequency(constant(100, true));
  CHECK(all_ones.p_value < 1e-15);
  CHECK_FALSE(all_ones.pass);
  CHECK_THROWS_AS(test_frequency(constant(50, true)), std::invalid_argument);
}

TEST_CASE("block frequency test: blind to alternation, catches blocks") {
  CHECK(test_block_frequency(alternating(100 * 128), 128).p_value ==
        doctest::Approx(1.0));
  // 128 ones then 128 zeros, repeated: every block is constant.
  BitStream s(StreamLabel::X);
  for (int b = 0; b < 100; ++b)
    for (int i = 0; i < 128; ++i) s.append(b % 2 == 0);
  const auto r = test_block_frequency(s, 128);
  CHECK(r.p_value < 1e-15);
}

TEST_CASE("runs test: alternation is maximal runs") {
  const auto r = test_runs(alternating(10'000));
  CHECK(r.p_value < 1e-15);
  CHECK_FALSE(r.pass);
  CHECK(r.valid);
}

TEST_CASE("runs test: prerequisite failure is distinct") {
  // 90% ones: the monobit prerequisite fails before the runs statistic.
  BitStream s(StreamLabel::X);
  Rng rng(5);
  for (int i = 0; i < 10'000; ++i) s.append(rng.bernoulli(0.9));
  const auto r = test_runs(s);
  CHECK_FALSE(r.valid);
  CHECK_FALSE(r.pass);
  CHECK(r.note == "monobit prerequisite failed");
}

TEST_CASE("cusum test: extremes") {
  const auto ones = test_cusum(constant(10'000, true));
  CHECK(ones.p_value < 1e-15);
  const auto alt = test_cusum(alternating(10'000));
  CHECK(alt.p_value > 0.9);
  const auto fwd = test_cusum(alternating(10'000), CusumMode::Forward);
  const auto bwd = test_cusum(alternating(10'000), CusumMode::Backward);
  CHECK(fwd.test_name == "cusum_forward");
  CHECK(bwd.test_name == "cusum_backward");
}

TEST_CASE("serial test: periodic pattern fails, parameters validated") {
  const auto r = test_serial(pattern(100'000, {0, 0, 1, 1}), 5);
  CHECK(r.p_value < 1e-6);
  CHECK(r.p_values.size() == 2);
  CHECK_THROWS_AS(test_serial(alternating(1000), 16), std::invalid_argument);
}

TEST_CASE("approximate entropy: constant input fails") {
  const auto r = test_approx_entropy(constant(10'000, true), 4);
  CHECK(r.p_value < 1e-6);
  CHECK_THROWS_AS(test_approx_entropy(alternating(200), 10),
                  std::invalid_argument);
}

TEST_CASE("null distribution: p-values uniform over fair-coin sequences") {
  // 60 sequences of 2e5 bits per test; KS distance below the 1% critical
  // value 1.628/sqrt(60) = 0.2102. The acceptance suite runs the full-size
  // version (200 x 1e6).
  const int reps = 60;
  const std::size_t n = 200'000;
  std::vector<double> p_freq, p_block, p_runs, p_cusum, p_serial1, p_serial2,
      p_apen;
  for (int r = 0; r < reps; ++r) {
    const auto s = gen_markov_bits({0.0, 0.0}, n, 7000 + r);
    p_freq.push_back(test_frequency(s).p_value);
    p_block.push_back(test_block_frequency(s, 128).p_value);
    p_runs.push_back(test_runs(s).p_value);
    p_cusum.push_back(test_cusum(s).p_value);
    const auto serial = test_serial(s, 14);
    p_serial1.push_back(serial.p_values[0]);
    p_serial2.push_back(serial.p_values[1]);
    p_apen.push_back(test_approx_entropy(s, 10).p_value);
  }
  const double crit = 1.628 / std::sqrt(static_cast<double>(reps));
  CHECK(ks_uniform(p_freq) < crit);
  CHECK(ks_uniform(p_block) < crit);
  CHECK(ks_uniform(p_runs) < crit);
  CHECK(ks_uniform(p_cusum) < crit);
  CHECK(ks_uniform(p_serial1) < crit);
  CHECK(ks_uniform(p_serial2) < crit);
  CHECK(ks_uniform(p_apen) < crit);
}

TEST_CASE("proportion threshold follows the NIST formula") {
  CHECK(proportion_threshold(1000, 0.01) == 980);
  CHECK(proportion_threshold(100, 0.01) == 96);
  CHECK(proportion_threshold(200, 0.01) == 193);
}

TEST_CASE("run_suite: partitioning, constant stream fails everything") {
  SuiteParams params;
  params.seq_len = 20'000;
  params.serial_m = 10;
  params.apen_m = 7;
  const auto bits = gen_markov_bits({0.0, 0.0}, 200'000, 99);
  const auto result = run_suite(bits, params);
  CHECK(result.sequences == 10);
  CHECK(result.tests.size() == 8);

  const auto bad = run_suite(constant(200'000, false), params);
  for (const auto& t : bad.tests) CHECK(t.pass_count == 0);
  CHECK_FALSE(bad.all_pass);
  CHECK_THROWS_AS(run_suite(gen_markov_bits({0, 0}, 1000, 1), SuiteParams{}),
                  std::invalid_argument);
}

TEST_CASE("run_suite: fair-coin stream passes at the proportion threshold") {
  SuiteParams params;
  params.seq_len = 100'000;
  params.serial_m = 13;
  const auto bits = gen_markov_bits({0.0, 0.0}, 2'000'000, 333);
  const auto result = run_suite(bits, params);
  CHECK(result.sequences == 20);
  CHECK(result.all_pass);
  for (const auto& t : result.tests) {
    CHECK(t.pass_count >= t.min_pass_count);
    CHECK(t.p_values.size() == 20);
  }
}

TEST_CASE("export/import: ascii layout") {
  const auto dir = std::filesystem::temp_directory_path() / "combosim_sts";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "bits.txt").string();
  export_bits(BitStream::from_bits(StreamLabel::X, {1, 0, 1}),
              BitFileFormat::Ascii, path);
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f);
  char buf[8] = {};
  const auto read = std::fread(buf, 1, sizeof(buf), f);
  std::fclose(f);
  CHECK(std::string(buf, read) == "101");
}

TEST_CASE("export/import: packed layout with sidecar pad") {
  const auto dir = std::filesystem::temp_directory_path() / "combosim_sts";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "bits.bin").string();
  export_bits(BitStream::from_bits(StreamLabel::X, {1, 0, 1, 0, 1, 0, 1, 0, 1}),
              BitFileFormat::Packed, path);
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f);
  unsigned char buf[4] = {};
  const auto read = std::fread(buf, 1, sizeof(buf), f);
  std::fclose(f);
  REQUIRE(read == 2);
  CHECK(buf[0] == 0xAA);
  CHECK(buf[1] == 0x80);
  const auto back = import_bits(path, BitFileFormat::Packed);
  CHECK(back == BitStream::from_bits(StreamLabel::X, {1, 0, 1, 0, 1, 0, 1, 0, 1}));
}

TEST_CASE("export/import: round trip across formats and lengths") {
  const auto dir = std::filesystem::temp_directory_path() / "combosim_sts";
  std::filesystem::create_directories(dir);
  Rng rng(2024);
  for (const std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{7},
                              std::size_t{8}, std::size_t{9}, std::size_t{63},
                              std::size_t{64}, std::size_t{65},
                              std::size_t{1000}, std::size_t{100'000}}) {
    BitStream s(StreamLabel::X);
    for (std::size_t i = 0; i < n; ++i) s.append(rng.bernoulli(0.5));
    const auto ascii_path = (dir / "rt.txt").string();
    export_bits(s, BitFileFormat::Ascii, ascii_path);
    CHECK(import_bits(ascii_path, BitFileFormat::Ascii) == s);
    const auto packed_path = (dir / "rt.bin").string();
    export_bits(s, BitFileFormat::Packed, packed_path);
    CHECK(import_bits(packed_path, BitFileFormat::Packed) == s);
  }
}

TEST_CASE("export: I/O failure carries the path") {
  try {
    export_bits(BitStream::from_bits(StreamLabel::X, {1}),
                BitFileFormat::Ascii, "/nonexistent_dir_xyz/bits.txt");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent_dir_xyz/bits.txt") !=
          std::string::npos);
  }
}
