#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "pqcv/checker.hpp"
#include "pqcv/circuit.hpp"
#include "pqcv/oracle.hpp"
#include "pqcv/report.hpp"

namespace fs = std::filesystem;
using namespace pqcv;

namespace {

enum class Output { Text, Json, Csv };

struct JobOptions {
  std::string strategy = "auto";
  double timeout = 1200.0;
  int confirm_samples = 0;
  std::string output = "text";
  std::uint64_t seed = 0;
  int jobs = 1;
};

void add_job_flags(CLI::App* cmd, JobOptions& o, bool with_jobs) {
  cmd->add_option("--strategy", o.strategy, "construct, alternate or auto")
      ->check(CLI::IsMember({"construct", "alternate", "auto"}))
      ->capture_default_str();
  cmd->add_option("--timeout", o.timeout, "wall-clock limit per check, seconds")->capture_default_str();
  cmd->add_option("--confirm-samples", o.confirm_samples, "cross-check with k numeric samples (0 = off)")
      ->capture_default_str();
  cmd->add_option("--output", o.output, "text, json or csv")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed for sampling")->envname("PQCV_SEED")->capture_default_str();
  if (with_jobs) cmd->add_option("--jobs", o.jobs, "parallel checks")->check(CLI::PositiveNumber)->capture_default_str();
}

CheckConfig to_config(const JobOptions& o) {
  CheckConfig c;
  c.strategy = strategy_from_string(o.strategy);
  c.timeout_s = o.timeout;
  return c;
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return 0;
    case Verdict::EquivalentUpToGlobalPhase: return 2;
    case Verdict::NotEquivalent: return 3;
  }
  return 5;
}

bool sampling_agrees(bool sampled_equal, Verdict v) {
  return sampled_equal == (v != Verdict::NotEquivalent);
}

int cmd_check(const std::string& f1, const std::string& f2, const JobOptions& o) {
  PQC c1;
  PQC c2;
  try {
    c1 = load_pqc(f1);
    c2 = load_pqc(f2);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  CheckReport r;
  try {
    r = check(c1, c2, to_config(o));
  } catch (const Timeout& e) {
    if (o.output == "json") {
      std::cout << nlohmann::json{{"error", "timeout"}, {"timeout_s", o.timeout}}.dump() << '\n';
    } else {
      std::cout << "timeout: " << e.what() << '\n';
    }
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (o.output == "json") {
    std::cout << report_json(r).dump() << '\n';
  } else if (o.output == "csv") {
    BenchRow row{fs::path(f1).stem().string(), c1.params.size(), c1.n_qubits, c1.gates.size(), c2.gates.size(), r, {}};
    std::cout << csv_header() << '\n' << csv_row(row) << '\n';
  } else {
    std::cout << report_text(r, &c1.params);
  }
  if (o.confirm_samples > 0) {
    const bool same = confirm_by_sampling(c1, c2, o.confirm_samples, o.seed);
    if (!sampling_agrees(same, r.verdict)) {
      std::cerr << "internal error: numeric sampling disagrees with the symbolic verdict\n";
      return 5;
    }
  }
  return exit_code(r.verdict);
}

struct GenOptions {
  std::string family = "RealAmplitudes";
  int qubits = 4;
  int reps = 1;
  std::string entanglement = "linear";
  int rewrites = 20;
  std::string inject = "none";
  double rate = 0.01;
  bool phase_variant = false;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

void upsert(std::vector<ManifestEntry>& entries, ManifestEntry e) {
  for (auto& x : entries) {
    if (x.name == e.name) {
      x = std::move(e);
      return;
    }
  }
  entries.push_back(std::move(e));
}

int cmd_gen(const GenOptions& g) {
  BenchSpec spec;
  spec.family = family_from_name(g.family);
  spec.n_qubits = g.qubits;
  spec.reps = g.reps;
  spec.entanglement = g.entanglement == "full" ? Entanglement::Full : Entanglement::Linear;
  spec.seed = g.seed;
  const auto gen = generate(spec);
  const std::string name = spec.name();
  fs::create_directories(g.out_dir);
  const fs::path dir(g.out_dir);

  const PQC rewritten = rewrite_equivalent(gen.circuit, g.seed, g.rewrites);
  save_pqc(gen.circuit, (dir / (name + ".pqc")).string(), gen.header);
  save_pqc(rewritten, (dir / (name + "_eq.pqc")).string(),
           gen.header + "\nrewritten with " + std::to_string(g.rewrites) + " rules, seed " + std::to_string(g.seed));

  const auto manifest_path = (dir / "manifest.json").string();
  std::vector<ManifestEntry> entries;
  if (fs::exists(manifest_path)) entries = load_manifest(manifest_path);
  upsert(entries, {name, name + ".pqc", name + "_eq.pqc", Verdict::Equivalent});
  std::cout << (dir / (name + ".pqc")).string() << '\n' << (dir / (name + "_eq.pqc")).string() << '\n';

  if (g.inject != "none") {
    const auto kind = g.inject == "X" ? ErrorKind::BitFlip : ErrorKind::PhaseFlip;
    int count = 0;
    const PQC bad = inject_errors(rewritten, g.rate, kind, g.seed, &count);
    const auto file = name + "_err.pqc";
    save_pqc(bad, (dir / file).string(),
             gen.header + "\n" + std::to_string(count) + " " + g.inject + " errors injected at rate " + std::to_string(g.rate));
    upsert(entries, {name + "_err", name + ".pqc", file, Verdict::NotEquivalent});
    std::cout << (dir / file).string() << '\n';
  }
  if (g.phase_variant) {
    const PQC ph = convert_rz_to_phase(rewritten);
    if (ph == rewritten) {
      std::cerr << "no rz gates to convert, phase variant skipped\n";
      save_manifest(entries, manifest_path);
      return 0;
    }
    const auto file = name + "_phase.pqc";
    save_pqc(ph, (dir / file).string(), gen.header + "\nrz gates replaced by p gates");
    upsert(entries, {name + "_phase", name + ".pqc", file, Verdict::EquivalentUpToGlobalPhase});
    std::cout << (dir / file).string() << '\n';
  }
  save_manifest(entries, manifest_path);
  return 0;
}

int cmd_inject(const std::string& file, double rate, const std::string& kind, std::uint64_t seed,
               const std::string& out) {
  const PQC c = load_pqc(file);
  int count = 0;
  const PQC bad = inject_errors(c, rate, kind == "X" ? ErrorKind::BitFlip : ErrorKind::PhaseFlip, seed, &count);
  save_pqc(bad, out, std::to_string(count) + " " + kind + " errors injected into " + file);
  std::cout << out << '\n';
  return 0;
}

int cmd_bench(const std::string& manifest, const JobOptions& o) {
  const auto entries = load_manifest(manifest);
  const fs::path base = fs::path(manifest).parent_path();
  const CheckConfig cfg = to_config(o);
  std::vector<BenchRow> rows(entries.size());
  std::vector<int> ok(entries.size(), 0);

#pragma omp parallel for schedule(dynamic) num_threads(o.jobs)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(entries.size()); ++i) {
    const auto& e = entries[static_cast<std::size_t>(i)];
    auto& row = rows[static_cast<std::size_t>(i)];
    row.name = e.name;
    try {
      const PQC c1 = load_pqc((base / e.file1).string());
      const PQC c2 = load_pqc((base / e.file2).string());
      row.params = c1.params.size();
      row.qubits = c1.n_qubits;
      row.gates1 = c1.gates.size();
      row.gates2 = c2.gates.size();
      try {
        row.report = check(c1, c2, cfg);
      } catch (const Timeout&) {
        continue;
      }
      bool good = row.report->verdict == e.expected;
      if (good && o.confirm_samples > 0) {
        good = sampling_agrees(confirm_by_sampling(c1, c2, o.confirm_samples, o.seed), row.report->verdict);
      }
      ok[static_cast<std::size_t>(i)] = good ? 1 : 0;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  }

  std::size_t matched = 0;
  if (o.output == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      nlohmann::json j = rows[i].report ? report_json(*rows[i].report) : nlohmann::json{{"error", rows[i].error.empty() ? "timeout" : rows[i].error}};
      j["name"] = rows[i].name;
      j["expected_verdict"] = std::string(to_string(entries[i].expected));
      arr.push_back(j);
      matched += static_cast<std::size_t>(ok[i]);
    }
    std::cout << arr.dump(2) << '\n';
  } else {
    std::cout << csv_header() << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::cout << csv_row(rows[i]) << '\n';
      matched += static_cast<std::size_t>(ok[i]);
    }
  }
  for (const auto& r : rows) {
    if (!r.error.empty()) std::cerr << r.name << ": " << r.error << '\n';
  }
  std::cout << "# " << matched << "/" << rows.size() << " expected\n";
  return matched == rows.size() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equivalence checker for parameterised quantum circuits"};
  app.require_subcommand(1);

  JobOptions check_opts;
  std::string f1;
  std::string f2;
  auto* check_cmd = app.add_subcommand("check", "decide equivalence of two circuit files");
  check_cmd->add_option("file1", f1)->required()->check(CLI::ExistingFile);
  check_cmd->add_option("file2", f2)->required()->check(CLI::ExistingFile);
  add_job_flags(check_cmd, check_opts, false);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate an ansatz and an equivalent rewrite");
  gen_cmd->add_option("--family", gen.family, "EfficientSU2, RealAmplitudes or TwoLocal")
      ->check(CLI::IsMember({"EfficientSU2", "RealAmplitudes", "TwoLocal"}))
      ->capture_default_str();
  gen_cmd->add_option("--qubits", gen.qubits)->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--reps", gen.reps)->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--entanglement", gen.entanglement)->check(CLI::IsMember({"linear", "full"}))->capture_default_str();
  gen_cmd->add_option("--rewrites", gen.rewrites)->check(CLI::NonNegativeNumber)->capture_default_str();
  gen_cmd->add_option("--inject", gen.inject, "also write an error-injected copy: none, X or Z")
      ->check(CLI::IsMember({"none", "X", "Z"}))
      ->capture_default_str();
  gen_cmd->add_option("--rate", gen.rate)->check(CLI::Range(1e-9, 1.0))->capture_default_str();
  gen_cmd->add_flag("--phase-variant", gen.phase_variant, "also write a copy with rz replaced by p");
  gen_cmd->add_option("--out-dir", gen.out_dir)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->envname("PQCV_SEED")->capture_default_str();

  std::string inj_file;
  std::string inj_kind = "X";
  std::string inj_out;
  double inj_rate = 0.01;
  std::uint64_t inj_seed = 0;
  auto* inj_cmd = app.add_subcommand("inject", "insert random X or Z errors");
  inj_cmd->add_option("file", inj_file)->required()->check(CLI::ExistingFile);
  inj_cmd->add_option("--rate", inj_rate)->check(CLI::Range(1e-9, 1.0))->capture_default_str();
  inj_cmd->add_option("--kind", inj_kind)->check(CLI::IsMember({"X", "Z"}))->capture_default_str();
  inj_cmd->add_option("--seed", inj_seed)->envname("PQCV_SEED")->capture_default_str();
  inj_cmd->add_option("-o,--out", inj_out)->required();

  JobOptions bench_opts;
  bench_opts.output = "csv";
  std::string manifest;
  auto* bench_cmd = app.add_subcommand("bench", "check every pair of a manifest");
  bench_cmd->add_option("manifest", manifest)->required()->check(CLI::ExistingFile);
  add_job_flags(bench_cmd, bench_opts, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*check_cmd) return cmd_check(f1, f2, check_opts);
    if (*gen_cmd) return cmd_gen(gen);
    if (*inj_cmd) return cmd_inject(inj_file, inj_rate, inj_kind, inj_seed, inj_out);
    if (*bench_cmd) return cmd_bench(manifest, bench_opts);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
