#include <gtest/gtest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <functional>
#include <filesystem>
#include <fstream>

#include "formkit/report.hpp"
#include "test_support.hpp"

using namespace formkit;
using formkit::testing::Gen;

namespace fs = std::filesystem;

namespace {

const char* kSingular = R"({
  "n": 2,
  "omega": [[[1, 0], [1, 0]], [[1, 0], [1, 0]]],
  "theta": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
  "psi":   [[[1, 0], [1, 0]], [[1, 0], [1, 0]]]
})";

const char* kDiag01 = R"({"n": 2, "omega": [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]})";

InstanceFile parse(const std::string& text) { return parse_instance_text(text, "test.json"); }

bool bitwise_equal(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double ar = a.data()[i].real(), ai = a.data()[i].imag();
    const double br = b.data()[i].real(), bi = b.data()[i].imag();
    if (std::memcmp(&ar, &br, sizeof ar) != 0 || std::memcmp(&ai, &bi, sizeof ai) != 0) return false;
  }
  return true;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::TheoremViolation;
}

struct CliRun {
  int status;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(FORMKIT_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  CliRun r{-1, {}};
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("formkit_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST(InstanceParse, Examples) {
  auto f = parse(R"({"n":1, "omega": [[[2,0]]]})");
  EXPECT_EQ(f.instance.n(), 1);
  EXPECT_EQ(f.instance.omega.matrix()(0, 0), Complex(2));
  EXPECT_EQ(f.instance.theta.matrix()(0, 0), Complex(1));
  // Default Ψ is the canonical majorant 1 + 2|2|.
  EXPECT_NEAR(f.instance.psi.matrix()(0, 0).real(), 5, 1e-15);

  f = parse(R"j({"family": {"name": "diag", "lambda": "n*exp(i*n)", "N": 8}})j");
  EXPECT_EQ(f.instance.n(), 8);
  ASSERT_TRUE(f.diag_family.has_value());
  EXPECT_EQ(f.diag_family->N, 8);
  EXPECT_NEAR(std::abs(f.instance.omega.matrix()(2, 2) - 3.0 * std::exp(Complex(0, 3))), 0, 1e-14);

  f = parse(R"({"family": {"name": "measure", "theta": [1, 0], "omega": [[0, 1], 2]}})");
  EXPECT_EQ(f.instance.n(), 2);
  EXPECT_EQ(f.instance.omega.matrix()(0, 0), Complex(0, 1));

  f = parse(R"({"family": {"name": "operator_pair", "S": [[[1,0]]], "T": [[[2,0]]]}})");
  EXPECT_EQ(f.instance.omega.matrix()(0, 0), Complex(2));
}

TEST(InstanceParse, ValidationErrors) {
  try {
    parse(R"({"n": 2, "omega": [[1, 0], [0, 1]], "theta": [[1, 0], [0, -1]]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ValidationError);
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("eigenvalue -1"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse(R"({"n": 2, "omega": [[1, 0]]})"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse(R"({"n": 2, "omega": [[1, 0], [0]]})"); }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse(R"({"n": 0, "omega": []})"); }), ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse(R"({"family": {"name": "spiral"}})"); }),
            ErrorCode::ValidationError);
  EXPECT_EQ(code_of([] { parse(R"({"family": {"name": "measure", "theta": [-1], "omega": [1]}})"); }),
            ErrorCode::ValidationError);
}

TEST(InstanceParse, ParseErrorsNameLineOrField) {
  try {
    parse("{\n  \"n\": 1,\n  \"omega\": [[[1, 0]]\n}");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  try {
    parse(R"({"n": 1, "omega": [[[1, "x"]]]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("omega[0][0]"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse(R"({"omega": [[[1, 0]]]})"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse(R"([1, 2])"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse(R"({"family": {"name": "diag", "lambda": "n +", "N": 3}})"); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_instance("/nonexistent/instance.json"); }), ErrorCode::ParseError);
}

TEST(InstanceEmit, RoundTripIsBitwise) {
  Gen gen(81);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = gen.integer(1, 6);
    CMatrix omega = gen.complex_matrix(n, n);
    // Awkward values: subnormals, huge magnitudes, negative zero.
    omega(0, 0) = Complex(std::ldexp(1.0, -1070), -0.0);
    if (n > 1) omega(1, 0) = Complex(1e300 / 3, -1.0 / 3);
    Instance inst{Form(omega), PositiveForm(gen.psd(n, gen.integer(0, static_cast<int>(n)))),
                  PositiveForm(gen.psd(n, n)), std::nullopt, "random \"quoted\" trial", {}};
    if (gen.coin()) inst.norm_gram = CMatrix(CMatrix::Identity(n, n) + gen.psd(n, 1));
    const InstanceFile back = parse(emit_instance(inst));
    EXPECT_TRUE(bitwise_equal(back.instance.omega.matrix(), inst.omega.matrix()));
    EXPECT_TRUE(bitwise_equal(back.instance.theta.matrix(), inst.theta.matrix()));
    EXPECT_TRUE(bitwise_equal(back.instance.psi.matrix(), inst.psi.matrix()));
    EXPECT_EQ(back.instance.norm_gram.has_value(), inst.norm_gram.has_value());
    if (inst.norm_gram) EXPECT_TRUE(bitwise_equal(*back.instance.norm_gram, *inst.norm_gram));
    EXPECT_EQ(back.instance.provenance, inst.provenance);
    // Emitting again gives the same bytes.
    EXPECT_EQ(emit_instance(back.instance), emit_instance(inst));
  }
}

TEST(RunCommand, HeaderCarriesTolerances) {
  CommandOptions opts;
  opts.tol.rank = 1e-11;
  const Report r = run_command("inspect", parse(kDiag01), opts);
  EXPECT_EQ(r["command"], "inspect");
  EXPECT_EQ(r["tolerances"]["rank"].get<double>(), 1e-11);
  EXPECT_EQ(r["tolerances"]["residual"].get<double>(), 1e-8);
  EXPECT_NE(render_text(r).find("1e-11"), std::string::npos);
}

TEST(RunCommand, DecomposeSingularExample) {
  const Report r = run_command("decompose", parse(kSingular), {});
  const auto& omega_r = r["omega_r"];
  for (const auto& row : omega_r)
    for (const auto& z : row) {
      EXPECT_LE(std::abs(z[0].get<double>()), 1e-15);
      EXPECT_LE(std::abs(z[1].get<double>()), 1e-15);
    }
  for (const auto& row : r["omega_s"])
    for (const auto& z : row) EXPECT_NEAR(z[0].get<double>(), 1, 1e-15);
  EXPECT_LE(r["witness_residuals"]["theta"].get<double>(), 1e-8);
  EXPECT_LE(r["witness_residuals"]["omega_s"].get<double>(), 1e-8);
}

TEST(RunCommand, NumrangeAndSolvableOnDiagonal) {
  CommandOptions opts;
  Report r = run_command("numrange", parse(kDiag01), opts);
  const auto& first = r["samples"][0];
  EXPECT_EQ(first["angle"].get<double>(), 0);
  EXPECT_NEAR(first["support"].get<double>(), 1, 1e-15);
  // Opposite direction: the support value at angle π is -min Re = 0.
  const auto& half = r["samples"][r["samples"].size() / 2];
  EXPECT_NEAR(half["angle"].get<double>(), M_PI, 1e-12);
  EXPECT_NEAR(half["support"].get<double>(), 0, 1e-15);

  opts.lambda = Complex(2, 0);
  r = run_command("solvable", parse(kDiag01), opts);
  EXPECT_TRUE(r["solvable"].get<bool>());
  EXPECT_NEAR(r["hull_distance"].get<double>(), 1, 1e-12);
  EXPECT_NEAR(r["resolvent_norm"].get<double>(), 1, 1e-15);
  EXPECT_EQ(r["location"], "outside");
}

TEST(RunCommand, SolvableNeedsExactlyOnePerturbation) {
  CommandOptions opts;
  EXPECT_EQ(code_of([&] { run_command("solvable", parse(kDiag01), opts); }), ErrorCode::ParseError);
  opts.lambda = Complex(2);
  opts.upsilon = "[[[0,0],[0,0]],[[0,0],[0,0]]]";
  EXPECT_EQ(code_of([&] { run_command("solvable", parse(kDiag01), opts); }), ErrorCode::ParseError);
  opts.lambda.reset();
  opts.upsilon = "[[[1,0],[0,0]],[[0,0],[1,0]]]";
  const Report r = run_command("solvable", parse(kDiag01), opts);
  EXPECT_TRUE(r["solvable"].get<bool>());
}

TEST(RunCommand, RefusalsKeepTheirCodes) {
  const char* outside = R"({"n": 1, "omega": [[[2, 0]]], "psi": [[[1, 0]]]})";
  EXPECT_EQ(code_of([&] { run_command("represent", parse(outside), {}); }), ErrorCode::NotInClassM);
  const char* not_ac =
      R"({"n": 2, "omega": [[[1,0],[0,0]],[[0,0],[1,0]]], "theta": [[[1,0],[0,0]],[[0,0],[0,0]]],
          "psi": [[[1,0],[0,0]],[[0,0],[1,0]]]})";
  EXPECT_EQ(code_of([&] { run_command("represent", parse(not_ac), {}); }),
            ErrorCode::NotAbsolutelyContinuous);
  EXPECT_EQ(code_of([&] { run_command("lab", parse(kDiag01), {}); }), ErrorCode::ValidationError);
}

TEST(RunCommand, EveryCommandIsDeterministic) {
  const InstanceFile f = parse(R"j({"family": {"name": "diag", "lambda": "n*exp(i*n)", "N": 6}})j");
  CommandOptions opts;
  opts.lambda = Complex(-100, 0);
  opts.Ns = {2, 4, 6};
  for (const auto& cmd : command_names()) {
    const std::string a = run_command(cmd, f, opts).dump(2);
    const std::string b = run_command(cmd, f, opts).dump(2);
    EXPECT_EQ(a, b) << cmd;
    EXPECT_EQ(render_text(run_command(cmd, f, opts)), render_text(run_command(cmd, f, opts))) << cmd;
  }
}

TEST(Flags, Parsing) {
  EXPECT_EQ(parse_complex_flag("2,0", "--lambda"), Complex(2, 0));
  EXPECT_EQ(parse_complex_flag("-1.5, 3", "--lambda"), Complex(-1.5, 3));
  EXPECT_EQ(parse_complex_flag("4", "--lambda"), Complex(4, 0));
  EXPECT_EQ(code_of([] { parse_complex_flag("2,x", "--lambda"); }), ErrorCode::ParseError);
  EXPECT_EQ(parse_int_list("8,16,32", "--N"), (std::vector<int>{8, 16, 32}));
  EXPECT_EQ(code_of([] { parse_int_list("8,,16", "--N"); }), ErrorCode::ParseError);
}

TEST(Binary, ExitCodesAndDeterminism) {
  TempDir dir;
  const std::string diag = dir.write("diag01.json", kDiag01);
  const std::string singular = dir.write("singular.json", kSingular);
  const std::string bad = dir.write("bad.json", "{\"n\": 1, \"omega\": [[[1, 0]]");
  const std::string outside = dir.write("outside.json", R"({"n": 1, "omega": [[[2, 0]]], "psi": [[[1, 0]]]})");

  CliRun r = run_cli("solvable " + diag + " --lambda 2,0 --json");
  EXPECT_EQ(r.status, 0);
  const Report doc = Report::parse(r.out);
  EXPECT_TRUE(doc["solvable"].get<bool>());
  EXPECT_NEAR(doc["hull_distance"].get<double>(), 1, 1e-12);
  EXPECT_EQ(run_cli("solvable " + diag + " --lambda 2,0 --json").out, r.out);

  r = run_cli("decompose " + singular);
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("omega_s"), std::string::npos);

  EXPECT_EQ(run_cli("inspect " + bad).status, 1);
  EXPECT_EQ(run_cli("inspect " + dir.path() + "/missing.json").status, 1);
  EXPECT_EQ(run_cli("frobnicate " + diag).status, 1);
  EXPECT_EQ(run_cli("solvable " + diag + " --lambda nope").status, 1);

  r = run_cli("represent " + outside + " --json");
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(Report::parse(r.out)["error"], "NotInClassM");

  // Batch: keyed by filename, worst exit code wins (input errors dominate).
  r = run_cli("inspect --batch " + dir.path() + " --json");
  EXPECT_EQ(r.status, 1);
  const Report batch = Report::parse(r.out);
  EXPECT_TRUE(batch.contains("diag01.json"));
  EXPECT_TRUE(batch.contains("bad.json"));
  EXPECT_EQ(batch["bad.json"]["error"], "ParseError");
  EXPECT_EQ(batch["diag01.json"]["command"], "inspect");
}
