#include "mpcore/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "mpcore/arith.hpp"
#include "mpcore/lanes.hpp"
#include "mpcore/linalg.hpp"
#include "mpcore/matrix_io.hpp"
#include "mpcore/refine.hpp"
#include "mpcore/testgen.hpp"

namespace mpcore {

namespace fs = std::filesystem;

std::string format_csv_row(const ReportRow& r) {
  char t[64];
  std::snprintf(t, sizeof t, "%.6f", r.time_seconds);
  std::ostringstream os;
  os << r.kind << ',' << r.prec << ',' << r.n << ',' << r.seed << ',' << r.long_bits << ',' << t
     << ',' << r.max_rel_err << ',';
  if (r.iterations) os << *r.iterations;
  os << ',' << r.stop_reason << ',' << r.status;
  return os.str();
}

std::string format_json_row(const ReportRow& r) {
  char t[64];
  std::snprintf(t, sizeof t, "%.6f", r.time_seconds);
  nlohmann::ordered_json j;
  j["kind"] = r.kind;
  j["prec"] = r.prec;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["long_bits"] = r.long_bits;
  j["time_seconds"] = std::string(t);
  j["max_rel_err"] = r.max_rel_err;
  j["iterations"] = r.iterations ? nlohmann::ordered_json(*r.iterations) : nlohmann::ordered_json();
  j["stop_reason"] = r.stop_reason;
  j["status"] = r.status;
  return j.dump();
}

namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kMatrixFile = "A.mpmat";
constexpr const char* kRhsFile = "b.mpmat";
constexpr const char* kSolutionFile = "x_true.mpmat";
constexpr const char* kMetaFile = "system.json";

int components_for(const std::string& prec) {
  if (prec == "dd") return 2;
  if (prec == "td") return 3;
  if (prec == "qd") return 4;
  throw DomainError("unknown precision '" + prec + "'");
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string error_text(const BigFloat& e) { return bf_format_decimal(e, 3); }

struct LoadedSystem {
  DenseMatrix<BigFloat> a;
  Vector<BigFloat> b;
  Vector<BigFloat> x_true;
  unsigned long long seed = 0;
  int bits = 0;
};

LoadedSystem load_system(const fs::path& dir) {
  LoadedSystem s;
  MatrixHeader h;
  s.a = load_bigfloat_matrix(dir / kMatrixFile, &h);
  s.bits = h.bits;
  s.b = load_bigfloat_vector(dir / kRhsFile);
  s.x_true = load_bigfloat_vector(dir / kSolutionFile);
  if (!s.a.is_square() || s.a.rows() != s.b.size() || s.b.size() != s.x_true.size()) {
    throw DimensionError("system files have inconsistent shapes");
  }
  std::ifstream meta(dir / kMetaFile);
  if (meta) {
    const auto j = nlohmann::json::parse(meta, nullptr, false);
    if (!j.is_discarded() && j.contains("seed")) s.seed = j["seed"].get<unsigned long long>();
  }
  return s;
}

struct Options {
  std::size_t n = 200;
  unsigned long long seed = 1;
  int cond = 26;
  int gen_bits = 512;
  int long_bits = kDefaultLongBits;
  std::string prec = "td";
  std::vector<std::string> precs{"dd", "td", "qd"};
  std::string rtol = "1e-100";
  std::string atol = "0";
  int max_iter = 50;
  std::string simd = "on";
  std::string format = "csv";
  std::string out;
  std::string in;
  int jobs = 1;

  LaneMode lanes() const {
    return effective_lane_mode(simd == "off" ? LaneMode::kScalar : LaneMode::kLanes);
  }
};

void fail_row(ReportRow& row, const std::exception& e, std::ostream& err) {
  const auto* me = dynamic_cast<const Error*>(&e);
  if (me && me->code() == ErrorCode::kSingular) {
    row.status = "singular";
  } else if (me && me->code() == ErrorCode::kOverflow) {
    row.status = "overflow";
  } else {
    row.status = "error";
  }
  row.max_rel_err.clear();
  row.iterations.reset();
  row.stop_reason.clear();
  static std::mutex mu;  // rows may fail on several workers at once
  std::lock_guard<std::mutex> lock(mu);
  err << "mpcore: " << row.kind << ' ' << row.prec << ": " << e.what() << '\n';
}

template <int K>
void direct_k(const LoadedSystem& s, LaneMode lanes, ReportRow& row) {
  const McArith<K> ar;
  DenseMatrix<MultiComp<K>> lu = to_multicomp<K>(s.a);
  const Vector<MultiComp<K>> b = to_multicomp<K>(s.b);
  const auto t0 = Clock::now();
  const PivotRecord piv = lu_factor_pp(ar, lu, lanes);
  const Vector<MultiComp<K>> x = lu_solve(ar, lu, piv, b);
  row.time_seconds = seconds_since(t0);
  row.max_rel_err =
      error_text(max_rel_err(to_bigfloat_exact<K>(x), s.x_true, PrecisionContext{row.long_bits}));
}

ReportRow run_direct(const LoadedSystem& s, const std::string& prec, const Options& o,
                     std::ostream& err) {
  ReportRow row;
  row.kind = "direct";
  row.prec = prec;
  row.n = s.b.size();
  row.seed = s.seed;
  row.long_bits = s.bits;
  try {
    switch (components_for(prec)) {
      case 2: direct_k<2>(s, o.lanes(), row); break;
      case 3: direct_k<3>(s, o.lanes(), row); break;
      default: direct_k<4>(s, o.lanes(), row); break;
    }
  } catch (const std::exception& e) {
    fail_row(row, e, err);
  }
  return row;
}

ReportRow run_mp_direct(const LoadedSystem& s, const Options& o, std::ostream& err) {
  ReportRow row;
  row.kind = "direct";
  row.prec = "mp";
  row.n = s.b.size();
  row.seed = s.seed;
  row.long_bits = o.long_bits;
  try {
    const PrecisionContext ctx{o.long_bits};
    const BfArith ar{ctx};
    DenseMatrix<BigFloat> lu = round_to(s.a, ctx);
    const Vector<BigFloat> b = round_to(s.b, ctx);
    const auto t0 = Clock::now();
    const PivotRecord piv = lu_factor_pp(ar, lu);
    const Vector<BigFloat> x = lu_solve(ar, lu, piv, b);
    row.time_seconds = seconds_since(t0);
    row.max_rel_err = error_text(max_rel_err(x, s.x_true, ctx));
  } catch (const std::exception& e) {
    fail_row(row, e, err);
  }
  return row;
}

ReportRow run_refine(const LoadedSystem& s, const std::string& prec, const Options& o,
                     std::ostream& err) {
  ReportRow row;
  row.kind = "refine";
  row.prec = prec;
  row.n = s.b.size();
  row.seed = s.seed;
  row.long_bits = o.long_bits;
  try {
    const PrecisionContext ctx{o.long_bits};
    RefineConfig cfg = default_refine_config(components_for(prec));
    cfg.long_bits = o.long_bits;
    cfg.rtol = bf_parse(o.rtol, ctx);
    cfg.atol = bf_parse(o.atol, ctx);
    cfg.max_iter = o.max_iter;
    cfg.lanes = o.lanes();
    const DenseMatrix<BigFloat> a = round_to(s.a, ctx);
    const Vector<BigFloat> b = round_to(s.b, ctx);
    const auto t0 = Clock::now();
    const RefineReport rep = iterative_refinement(a, b, cfg);
    row.time_seconds = seconds_since(t0);
    row.max_rel_err = error_text(max_rel_err(rep.solution, s.x_true, ctx));
    row.iterations = rep.iterations;
    row.stop_reason = stop_reason_name(rep.stop_reason);
  } catch (const std::exception& e) {
    fail_row(row, e, err);
  }
  return row;
}

// Runs tasks on `jobs` workers; results keep task order.
std::vector<ReportRow> run_rows(std::vector<std::function<ReportRow()>> tasks, int jobs) {
  std::vector<ReportRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) rows[i] = tasks[i]();
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

int emit_rows(const std::vector<ReportRow>& rows, const Options& o, std::ostream& out) {
  std::ostringstream text;
  if (o.format == "csv") text << kCsvHeader << '\n';
  for (const auto& r : rows) text << (o.format == "csv" ? format_csv_row(r) : format_json_row(r)) << '\n';
  if (o.out.empty()) {
    out << text.str();
  } else {
    std::ofstream f(o.out, std::ios::trunc);
    if (!f) throw IoError("cannot open '" + o.out + "' for writing");
    f << text.str();
    if (!f) throw IoError("write to '" + o.out + "' failed");
  }
  const bool all_ok =
      std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.status == "ok"; });
  return all_ok ? 0 : 1;
}

void write_system(const GeneratedSystem& gen, const Options& o, const fs::path& dir) {
  fs::create_directories(dir);
  const GeneratedSystem sys = export_system(gen, o.long_bits);
  save_matrix(dir / kMatrixFile, sys.a, o.long_bits);
  save_vector(dir / kRhsFile, sys.b, o.long_bits);
  save_vector(dir / kSolutionFile, sys.x_true, o.long_bits);
  nlohmann::ordered_json meta;
  meta["n"] = gen.spec.n;
  meta["seed"] = gen.spec.seed;
  meta["seed_used"] = gen.seed_used;
  meta["cond_exponent"] = gen.spec.cond_exponent;
  meta["gen_bits"] = gen.spec.gen_bits;
  meta["long_bits"] = o.long_bits;
  std::ofstream f(dir / kMetaFile, std::ios::trunc);
  f << meta.dump(2) << '\n';
  if (!f) throw IoError("cannot write " + (dir / kMetaFile).string());
}

GeneratedSystem generate(const Options& o) {
  ProblemSpec spec;
  spec.n = o.n;
  spec.seed = o.seed;
  spec.cond_exponent = o.cond;
  spec.gen_bits = o.gen_bits;
  return build_system(spec);
}

LoadedSystem in_memory(const GeneratedSystem& gen, int bits) {
  const GeneratedSystem sys = export_system(gen, bits);
  LoadedSystem s;
  s.a = sys.a;
  s.b = sys.b;
  s.x_true = sys.x_true;
  s.seed = gen.spec.seed;
  s.bits = bits;
  return s;
}

void add_shared(CLI::App* cmd, Options& o) {
  cmd->add_option("--simd", o.simd, "Batch-kernel lane path")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", o.out, "Report file (default: standard output)");
}

void add_refine_opts(CLI::App* cmd, Options& o) {
  cmd->add_option("--long-bits", o.long_bits, "Long (residual) precision in bits")
      ->check(CLI::Range(64, 1 << 20));
  cmd->add_option("--rtol", o.rtol, "Relative tolerance (decimal text)");
  cmd->add_option("--atol", o.atol, "Absolute tolerance (decimal text)");
  cmd->add_option("--max-iter", o.max_iter, "Refinement iteration limit")
      ->check(CLI::Range(1, 1 << 20));
}

void add_gen_opts(CLI::App* cmd, Options& o) {
  cmd->add_option("--n", o.n, "System dimension")->check(CLI::Range(2, 1 << 16));
  cmd->add_option("--seed", o.seed, "Generator seed");
  cmd->add_option("--cond", o.cond, "Diagonal spans 10^0 .. 10^-cond")->check(CLI::Range(0, 1000));
  cmd->add_option("--gen-bits", o.gen_bits, "Generation precision in bits")
      ->check(CLI::Range(64, 1 << 20));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Multi-component precision linear solvers and benchmark harness", "mpcore"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a benchmark system into a directory");
  add_gen_opts(gen, o);
  gen->add_option("--long-bits", o.long_bits, "Precision of the written files")
      ->check(CLI::Range(64, 1 << 20));
  gen->add_option("--out", o.out, "Output directory")->required();

  auto* direct = app.add_subcommand("direct", "LU direct solve at one short precision");
  direct->add_option("--in", o.in, "System directory written by gen")->required();
  direct->add_option("--prec", o.prec, "Short precision")->check(CLI::IsMember({"dd", "td", "qd"}));
  add_shared(direct, o);

  auto* refine = app.add_subcommand("refine", "Mixed-precision iterative refinement");
  refine->add_option("--in", o.in, "System directory written by gen")->required();
  refine->add_option("--prec", o.prec, "Short precision")->check(CLI::IsMember({"dd", "td", "qd"}));
  add_refine_opts(refine, o);
  add_shared(refine, o);

  auto* bench = app.add_subcommand("bench", "Direct and refined solves at every precision");
  add_gen_opts(bench, o);
  bench->add_option("--precs", o.precs, "Short precisions")
      ->delimiter(',')
      ->check(CLI::IsMember({"dd", "td", "qd"}));
  add_refine_opts(bench, o);
  add_shared(bench, o);
  bench->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 256));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      write_system(generate(o), o, o.out);
      return 0;
    }
    if (*direct) {
      const LoadedSystem s = load_system(o.in);
      return emit_rows({run_direct(s, o.prec, o, err)}, o, out);
    }
    if (*refine) {
      const LoadedSystem s = load_system(o.in);
      return emit_rows({run_refine(s, o.prec, o, err)}, o, out);
    }
    const GeneratedSystem g = generate(o);
    const LoadedSystem s = in_memory(g, o.long_bits);
    std::vector<std::function<ReportRow()>> tasks;
    for (const auto& p : o.precs) tasks.push_back([&, p] { return run_direct(s, p, o, err); });
    for (const auto& p : o.precs) tasks.push_back([&, p] { return run_refine(s, p, o, err); });
    tasks.push_back([&] { return run_mp_direct(s, o, err); });
    return emit_rows(run_rows(std::move(tasks), o.jobs), o, out);
  } catch (const std::exception& e) {
    err << "mpcore: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mpcore
