#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pqcv/report.hpp"
#include "support.hpp"

using namespace pqcv;
namespace fs = std::filesystem;

namespace {

const std::string kBin = PQCV_BIN;
const std::string kCircuits = PQCV_CIRCUITS;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  CliResult r;
  const std::string cmd = kBin + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string circuit(const std::string& name) { return kCircuits + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path d = fs::path(::testing::TempDir()) / ("pqcv_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Report, JsonSchema) {
  const PQC a = parse_pqc("qubits 1; param w; rz(w) 0;");
  const auto j = report_json(check(a, a));
  for (const char* k : {"verdict", "aborted_at_param", "phase_is_constant", "node_max", "node_final", "node_tdd",
                        "node_trdd", "time_s"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_EQ(j.size(), 8U);
  EXPECT_EQ(j["verdict"], "Equivalent");
  EXPECT_TRUE(j["aborted_at_param"].is_null());
  const auto back = nlohmann::json::parse(j.dump());
  EXPECT_EQ(back, j);
}

TEST(Report, TextMentionsPhase) {
  const PQC a = parse_pqc("qubits 1; param w; rz(w) 0;");
  const auto r = check(a, convert_rz_to_phase(a));
  const std::string t = report_text(r, &a.params);
  EXPECT_NE(t.find("EquivalentUpToGlobalPhase"), std::string::npos);
  EXPECT_NE(t.find("global phase: "), std::string::npos);
  EXPECT_NE(t.find("sin(w)"), std::string::npos);
}

TEST(Report, CsvColumns) {
  EXPECT_EQ(csv_header(), "name,P,Q,G1,G2,node_max,node_final,node_tdd,node_trdd,verdict,time_s");
  BenchRow row{"x", 1, 2, 3, 4, std::nullopt, {}};
  EXPECT_EQ(csv_row(row), "x,1,2,3,4,,,,,timeout,");
  const PQC a = parse_pqc("qubits 1; h 0;");
  row.report = check(a, a);
  const std::string s = csv_row(row);
  EXPECT_EQ(std::count(s.begin(), s.end(), ','), 10);
  EXPECT_NE(s.find(",Equivalent,"), std::string::npos);
}

TEST(Report, ManifestRoundTripAndSchemaErrors) {
  const std::vector<ManifestEntry> m{{"a", "a.pqc", "b.pqc", Verdict::Equivalent},
                                     {"b", "a.pqc", "c.pqc", Verdict::NotEquivalent}};
  const auto back = manifest_from_json(manifest_json(m));
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[1].name, "b");
  EXPECT_EQ(back[1].expected, Verdict::NotEquivalent);
  EXPECT_THROW(manifest_from_json(nlohmann::json::object()), std::invalid_argument);
  EXPECT_THROW(manifest_from_json(nlohmann::json::parse(R"([{"name":"a","file1":"x"}])")), std::invalid_argument);
  EXPECT_THROW(manifest_from_json(nlohmann::json::parse(R"([{"name":"a","file1":"x","file2":"y","expected_verdict":"maybe"}])")),
               std::invalid_argument);
}

TEST(Cli, CheckExitCodes) {
  EXPECT_EQ(run("check " + circuit("rz_pair.pqc") + " " + circuit("rz_diff.pqc")).code, 0);
  EXPECT_EQ(run("check " + circuit("rz_pair.pqc") + " " + circuit("rz_pair_z.pqc")).code, 3);
  EXPECT_EQ(run("check " + circuit("rz_pair.pqc") + " " + circuit("rz_pair_phase.pqc")).code, 2);
  EXPECT_EQ(run("check " + circuit("rz_pair.pqc") + " " + circuit("bad.pqc")).code, 1);
  EXPECT_EQ(run("check " + circuit("rz_pair.pqc")).code, 1);
  EXPECT_EQ(run("check " + circuit("rz_pair.pqc") + " " + circuit("rz_diff.pqc") + " --strategy fastest").code, 1);
}

TEST(Cli, ExitCodeDependsOnVerdictOnly) {
  for (const char* s : {"construct", "alternate", "auto"}) {
    for (const char* o : {"text", "json", "csv"}) {
      const std::string flags = std::string(" --strategy ") + s + " --output " + o + " --confirm-samples 5";
      EXPECT_EQ(run("check " + circuit("rz_pair.pqc") + " " + circuit("rz_diff.pqc") + flags).code, 0);
      EXPECT_EQ(run("check " + circuit("rz_pair.pqc") + " " + circuit("rz_pair_z.pqc") + flags).code, 3);
    }
  }
}

TEST(Cli, JsonOutputParses) {
  const CliResult r = run("check " + circuit("rz_pair.pqc") + " " + circuit("rz_diff.pqc") + " --output json");
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["verdict"], "Equivalent");
  EXPECT_EQ(j.size(), 8U);
}

TEST(Cli, TimeoutExitCode) {
  const auto dir = scratch("timeout");
  BenchSpec s;
  s.family = Family::EfficientSU2;
  s.n_qubits = 6;
  s.reps = 3;
  save_pqc(generate(s).circuit, (dir / "a.pqc").string());
  const std::string f = (dir / "a.pqc").string();
  EXPECT_EQ(run("check " + f + " " + f + " --strategy construct --timeout 0.01").code, 4);
}

TEST(Cli, GenWritesPairAndManifest) {
  const auto dir = scratch("gen");
  const CliResult r = run("gen --family RealAmplitudes --qubits 4 --reps 2 --seed 1 --out-dir " + dir.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(fs::exists(dir / "RealAmplitudes_4_2.pqc"));
  EXPECT_TRUE(fs::exists(dir / "RealAmplitudes_4_2_eq.pqc"));
  const auto m = load_manifest((dir / "manifest.json").string());
  ASSERT_EQ(m.size(), 1U);
  EXPECT_EQ(m[0].expected, Verdict::Equivalent);
  EXPECT_EQ(load_pqc((dir / "RealAmplitudes_4_2.pqc").string()).params.size(), 12U);
  // a second run adds to the manifest instead of replacing it
  ASSERT_EQ(run("gen --family EfficientSU2 --qubits 3 --reps 1 --inject X --phase-variant --out-dir " + dir.string()).code, 0);
  EXPECT_EQ(load_manifest((dir / "manifest.json").string()).size(), 4U);
}

TEST(Cli, InjectProducesInequivalentFile) {
  const auto dir = scratch("inject");
  ASSERT_EQ(run("gen --family EfficientSU2 --qubits 3 --reps 2 --out-dir " + dir.string()).code, 0);
  const std::string src = (dir / "EfficientSU2_3_2.pqc").string();
  const std::string out = (dir / "z.pqc").string();
  ASSERT_EQ(run("inject " + src + " --rate 0.01 --kind Z --seed 4 -o " + out).code, 0);
  EXPECT_EQ(run("check " + src + " " + out).code, 3);
}

TEST(Cli, BenchThreePairs) {
  const auto dir = scratch("bench");
  for (const char* f : {"rz_pair.pqc", "rz_diff.pqc", "rz_pair_z.pqc", "rz_pair_phase.pqc"}) fs::copy_file(circuit(f), dir / f);
  save_manifest({{"pair", "rz_pair.pqc", "rz_diff.pqc", Verdict::Equivalent},
                 {"pair_z", "rz_pair.pqc", "rz_pair_z.pqc", Verdict::NotEquivalent},
                 {"pair_phase", "rz_pair.pqc", "rz_pair_phase.pqc", Verdict::EquivalentUpToGlobalPhase}},
                (dir / "manifest.json").string());
  const CliResult r = run("bench " + (dir / "manifest.json").string() + " --jobs 2 --confirm-samples 3");
  EXPECT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 5U) << r.out;
  EXPECT_EQ(lines[0], csv_header());
  EXPECT_EQ(lines[1].rfind("pair,", 0), 0U);
  EXPECT_EQ(lines[2].rfind("pair_z,", 0), 0U);
  EXPECT_EQ(lines[3].rfind("pair_phase,", 0), 0U);
  EXPECT_EQ(lines[4], "# 3/3 expected");

  // deterministic apart from the time column
  auto strip = [](const std::string& s) {
    std::string out;
    std::istringstream ss(s);
    for (std::string l; std::getline(ss, l);) out += l.substr(0, l.rfind(',')) + "\n";
    return out;
  };
  EXPECT_EQ(strip(run("bench " + (dir / "manifest.json").string()).out), strip(r.out));
}

TEST(Cli, BenchReportsMismatchAndSchemaErrors) {
  const auto dir = scratch("bench_bad");
  fs::copy_file(circuit("rz_pair.pqc"), dir / "rz_pair.pqc");
  fs::copy_file(circuit("rz_pair_z.pqc"), dir / "rz_pair_z.pqc");
  save_manifest({{"wrong", "rz_pair.pqc", "rz_pair_z.pqc", Verdict::Equivalent}}, (dir / "m.json").string());
  const CliResult r = run("bench " + (dir / "m.json").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("# 0/1 expected"), std::string::npos);
  std::ofstream(dir / "broken.json") << R"({"not": "a list"})";
  EXPECT_EQ(run("bench " + (dir / "broken.json").string()).code, 1);
}

TEST(Cli, SeedFromEnvironment) {
  const auto dir = scratch("env");
  const std::string a = (dir / "a").string();
  const std::string b = (dir / "b").string();
  ASSERT_EQ(std::system(("PQCV_SEED=5 " + kBin + " gen --qubits 3 --reps 2 --rewrites 30 --out-dir " + a + " >/dev/null").c_str()), 0);
  ASSERT_EQ(run("gen --qubits 3 --reps 2 --rewrites 30 --seed 5 --out-dir " + b).code, 0);
  std::ifstream fa(fs::path(a) / "RealAmplitudes_3_2_eq.pqc");
  std::ifstream fb(fs::path(b) / "RealAmplitudes_3_2_eq.pqc");
  std::stringstream sa;
  std::stringstream sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(sa.str().empty());
}
