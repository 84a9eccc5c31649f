#pragma once

// Benchmark harness behind the `mpcore` executable.
//
//   mpcore gen    --n N --seed S [--cond C] [--gen-bits G] [--long-bits L] --out DIR
//   mpcore direct --in DIR --prec dd|td|qd [--simd on|off] [--format csv|json] [--out FILE]
//   mpcore refine --in DIR --prec dd|td|qd [--long-bits L] [--rtol T] [--atol T]
//                 [--max-iter M] [--simd on|off] [--format csv|json] [--out FILE]
//   mpcore bench  --n N --seed S [--precs dd,td,qd] [--long-bits L] [--rtol T] [--atol T]
//                 [--max-iter M] [--simd on|off] [--format csv|json] [--out FILE] [--jobs J]
//
// gen writes A.mpmat, b.mpmat, x_true.mpmat and system.json into DIR.
// Report rows always carry the columns of kCsvHeader, in that order; JSON
// output has one object per row with the same keys and the same values
// (integers as numbers, everything else as strings).
// Exit status: 0 when every requested row was produced, 1 when some row
// failed, 2 for usage errors.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mpcore {

inline constexpr const char* kCsvHeader =
    "kind,prec,n,seed,long_bits,time_seconds,max_rel_err,iterations,stop_reason,status";

struct ReportRow {
  std::string kind;  // direct | refine
  std::string prec;  // dd | td | qd | mp
  std::size_t n = 0;
  unsigned long long seed = 0;
  int long_bits = 0;
  double time_seconds = 0;
  std::string max_rel_err;  // decimal text; empty when the row failed
  std::optional<std::size_t> iterations;
  std::string stop_reason;
  std::string status = "ok";  // ok | singular | overflow | error
};

std::string format_csv_row(const ReportRow& row);
std::string format_json_row(const ReportRow& row);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mpcore
