#include "mpcore/mpcore_c.h"

#include <atomic>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>
#include <string>
#include <variant>
#include <vector>

#include "mpcore/arith.hpp"
#include "mpcore/lanes.hpp"
#include "mpcore/linalg.hpp"
#include "mpcore/matrix_io.hpp"
#include "mpcore/refine.hpp"

namespace {

using namespace mpcore;

thread_local std::string g_last_error;

// A status-carrying failure raised inside this file.
struct Status {
  int code;
  std::string message;
};

using McMatrix = std::variant<DenseMatrix<MultiComp<2>>, DenseMatrix<MultiComp<3>>,
                              DenseMatrix<MultiComp<4>>>;

struct MatrixObj {
  McMatrix data;
  bool is_vector = false;
};

struct PivotObj {
  PivotRecord piv;
  std::size_t n = 0;
};

struct ReportObj {
  RefineReport report;
};

struct Object {
  std::variant<MatrixObj, PivotObj, ReportObj> payload;
  // > 0: that many readers, -1: one writer, 0: idle.
  std::atomic<int> access{0};
};

// Slot index in the low 32 bits (plus one, so 0 is never valid), generation
// in the high 32 bits. A released slot bumps its generation, so stale
// handles never resolve again.
class HandleTable {
 public:
  mpcore_handle insert(std::shared_ptr<Object> obj) {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t slot;
    if (!free_.empty()) {
      slot = free_.back();
      free_.pop_back();
    } else {
      slot = slots_.size();
      slots_.push_back({});
    }
    slots_[slot].obj = std::move(obj);
    return (static_cast<std::uint64_t>(slots_[slot].generation) << 32) | (slot + 1);
  }

  std::shared_ptr<Object> find(mpcore_handle h) {
    std::lock_guard<std::mutex> lock(mu_);
    Slot* s = locate(h);
    return s ? s->obj : nullptr;
  }

  bool erase(mpcore_handle h) {
    std::lock_guard<std::mutex> lock(mu_);
    Slot* s = locate(h);
    if (!s) return false;
    s->obj.reset();
    ++s->generation;
    free_.push_back((h & 0xffffffffu) - 1);
    return true;
  }

 private:
  struct Slot {
    std::uint32_t generation = 1;
    std::shared_ptr<Object> obj;
  };

  Slot* locate(mpcore_handle h) {
    const std::uint64_t low = h & 0xffffffffu;
    if (low == 0 || low > slots_.size()) return nullptr;
    Slot& s = slots_[low - 1];
    if (!s.obj || s.generation != static_cast<std::uint32_t>(h >> 32)) return nullptr;
    return &s;
  }

  std::mutex mu_;
  std::vector<Slot> slots_;
  std::vector<std::size_t> free_;
};

HandleTable& table() {
  static HandleTable* t = new HandleTable;  // never destroyed: usable during exit
  return *t;
}

class Access {
 public:
  Access(std::shared_ptr<Object> obj, bool write) : obj_(std::move(obj)), write_(write) {
    int cur = obj_->access.load();
    for (;;) {
      if (write_ ? cur != 0 : cur < 0) {
        throw Status{MPCORE_E_INTERNAL, "handle is in use by another call"};
      }
      if (obj_->access.compare_exchange_weak(cur, write_ ? -1 : cur + 1)) break;
    }
  }
  ~Access() {
    if (write_) {
      obj_->access.store(0);
    } else {
      obj_->access.fetch_sub(1);
    }
  }
  Access(const Access&) = delete;
  Access& operator=(const Access&) = delete;

  Object& operator*() const { return *obj_; }

 private:
  std::shared_ptr<Object> obj_;
  bool write_;
};

std::shared_ptr<Object> lookup(mpcore_handle h) {
  auto obj = table().find(h);
  if (!obj) throw Status{MPCORE_E_INVALID_HANDLE, "invalid or released handle"};
  return obj;
}

template <typename T>
T& payload_as(Object& o, const char* kind) {
  T* p = std::get_if<T>(&o.payload);
  if (!p) throw Status{MPCORE_E_INVALID_HANDLE, std::string("handle is not a ") + kind};
  return *p;
}

int status_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidHandle: return MPCORE_E_INVALID_HANDLE;
    case ErrorCode::kDimensionMismatch: return MPCORE_E_DIMENSION;
    case ErrorCode::kSingular: return MPCORE_E_SINGULAR;
    case ErrorCode::kParse: return MPCORE_E_PARSE;
    case ErrorCode::kOverflow:
    case ErrorCode::kDivideByZero: return MPCORE_E_OVERFLOW;
    default: return MPCORE_E_INTERNAL;
  }
}

template <typename F>
int guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MPCORE_OK;
  } catch (const Status& s) {
    g_last_error = s.message;
    return s.code;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MPCORE_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MPCORE_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return MPCORE_E_INTERNAL;
  }
}

void require_out(const void* p) {
  if (!p) throw Status{MPCORE_E_INTERNAL, "null output pointer"};
}

McMatrix make_matrix(int k, std::size_t rows, std::size_t cols) {
  switch (k) {
    case 2: return DenseMatrix<MultiComp<2>>(rows, cols);
    case 3: return DenseMatrix<MultiComp<3>>(rows, cols);
    case 4: return DenseMatrix<MultiComp<4>>(rows, cols);
  }
  throw Status{MPCORE_E_DIMENSION, "component count must be 2, 3 or 4"};
}

int components_of(const McMatrix& m) { return static_cast<int>(m.index()) + 2; }

template <typename M>
void check_index(const M& m, std::size_t i, std::size_t j) {
  if (i >= m.rows() || j >= m.cols()) throw Status{MPCORE_E_DIMENSION, "element index out of range"};
}

mpcore_handle insert_object(auto payload) {
  auto obj = std::make_shared<Object>();
  obj->payload = std::move(payload);
  return table().insert(std::move(obj));
}

}  // namespace

extern "C" {

const char* mpcore_version(void) { return "1.0.0"; }

int mpcore_simd_enabled(void) { return default_lane_mode() == LaneMode::kLanes ? 1 : 0; }

const char* mpcore_last_error(void) { return g_last_error.c_str(); }

int mpcore_mc_matrix_new(int k, size_t rows, size_t cols, mpcore_handle* out) {
  return guarded([&] {
    require_out(out);
    if (rows == 0 || cols == 0) throw Status{MPCORE_E_DIMENSION, "empty shape"};
    *out = insert_object(MatrixObj{make_matrix(k, rows, cols), false});
  });
}

int mpcore_mc_vector_new(int k, size_t len, mpcore_handle* out) {
  return guarded([&] {
    require_out(out);
    if (len == 0) throw Status{MPCORE_E_DIMENSION, "empty vector"};
    *out = insert_object(MatrixObj{make_matrix(k, len, 1), true});
  });
}

int mpcore_release(mpcore_handle h) {
  return guarded([&] {
    if (!table().erase(h)) throw Status{MPCORE_E_INVALID_HANDLE, "invalid or released handle"};
  });
}

int mpcore_mc_shape(mpcore_handle h, size_t* rows, size_t* cols, int* k) {
  return guarded([&] {
    Access acc(lookup(h), false);
    const auto& m = payload_as<MatrixObj>(*acc, "matrix or vector");
    std::visit(
        [&](const auto& a) {
          if (rows) *rows = a.rows();
          if (cols) *cols = a.cols();
        },
        m.data);
    if (k) *k = components_of(m.data);
  });
}

int mpcore_mc_set_element_from_decimal(mpcore_handle h, size_t row, size_t col,
                                       const char* text) {
  return guarded([&] {
    if (!text) throw Status{MPCORE_E_PARSE, "null text"};
    Access acc(lookup(h), true);
    auto& m = payload_as<MatrixObj>(*acc, "matrix or vector");
    std::visit(
        [&](auto& a) {
          check_index(a, row, col);
          constexpr int K = std::decay_t<decltype(a)>::Scalar::kComponents;
          // Parsed 64 bits past the K-component precision, then split.
          const BigFloat v = bf_parse(text, PrecisionContext{53 * K + 64});
          a(row, col) = bf_to_multicomp<K>(v);
        },
        m.data);
  });
}

int mpcore_mc_get_element_components(mpcore_handle h, size_t row, size_t col, double* out,
                                     size_t out_len) {
  return guarded([&] {
    require_out(out);
    Access acc(lookup(h), false);
    const auto& m = payload_as<MatrixObj>(*acc, "matrix or vector");
    std::visit(
        [&](const auto& a) {
          check_index(a, row, col);
          constexpr int K = std::decay_t<decltype(a)>::Scalar::kComponents;
          if (out_len < static_cast<size_t>(K)) {
            throw Status{MPCORE_E_DIMENSION, "output buffer shorter than k"};
          }
          for (int c = 0; c < K; ++c) out[c] = a(row, col).c[c];
        },
        m.data);
  });
}

int mpcore_mc_set_element_components(mpcore_handle h, size_t row, size_t col,
                                     const double* terms, size_t len) {
  return guarded([&] {
    if (!terms) throw Status{MPCORE_E_DIMENSION, "null component array"};
    Access acc(lookup(h), true);
    auto& m = payload_as<MatrixObj>(*acc, "matrix or vector");
    std::visit(
        [&](auto& a) {
          check_index(a, row, col);
          constexpr int K = std::decay_t<decltype(a)>::Scalar::kComponents;
          a(row, col) = renormalize<K>(std::span<const double>(terms, len));
        },
        m.data);
  });
}

int mpcore_mc_lu_factor(mpcore_handle matrix, mpcore_handle* piv_out) {
  return guarded([&] {
    require_out(piv_out);
    Access acc(lookup(matrix), true);
    auto& m = payload_as<MatrixObj>(*acc, "matrix");
    if (m.is_vector) throw Status{MPCORE_E_DIMENSION, "cannot factor a vector"};
    PivotObj p;
    std::visit(
        [&](auto& a) {
          constexpr int K = std::decay_t<decltype(a)>::Scalar::kComponents;
          if (!a.is_square()) throw Status{MPCORE_E_DIMENSION, "matrix not square"};
          p.piv = lu_factor_pp(McArith<K>{}, a, default_lane_mode());
          p.n = a.rows();
        },
        m.data);
    *piv_out = insert_object(std::move(p));
  });
}

int mpcore_mc_lu_solve(mpcore_handle lu, mpcore_handle piv, mpcore_handle b, mpcore_handle x) {
  return guarded([&] {
    Access lu_acc(lookup(lu), false);
    Access piv_acc(lookup(piv), false);
    const auto& lm = payload_as<MatrixObj>(*lu_acc, "matrix");
    const auto& pv = payload_as<PivotObj>(*piv_acc, "pivot record");
    // b is read and x written; when they are the same object, one write
    // access covers both.
    auto b_obj = lookup(b);
    auto x_obj = lookup(x);
    const bool same = b_obj == x_obj;
    if (b_obj.get() == &*lu_acc || x_obj.get() == &*lu_acc) {
      throw Status{MPCORE_E_INTERNAL, "factors cannot also be the right-hand side or result"};
    }
    std::unique_ptr<Access> b_acc;
    if (!same) b_acc = std::make_unique<Access>(b_obj, false);
    Access x_acc(x_obj, true);
    const auto& bm = payload_as<MatrixObj>(same ? *x_acc : **b_acc, "vector");
    auto& xm = payload_as<MatrixObj>(*x_acc, "vector");
    if (!bm.is_vector || !xm.is_vector) throw Status{MPCORE_E_DIMENSION, "b and x must be vectors"};
    if (lm.data.index() != bm.data.index() || lm.data.index() != xm.data.index()) {
      throw Status{MPCORE_E_DIMENSION, "component counts differ"};
    }
    std::visit(
        [&](const auto& a) {
          using M = std::decay_t<decltype(a)>;
          constexpr int K = M::Scalar::kComponents;
          const auto& bv = std::get<M>(bm.data);
          auto& xv = std::get<M>(xm.data);
          if (a.rows() != pv.n || bv.rows() != pv.n || xv.rows() != pv.n) {
            throw Status{MPCORE_E_DIMENSION, "system size mismatch"};
          }
          Vector<MultiComp<K>> rhs(pv.n);
          for (std::size_t i = 0; i < pv.n; ++i) rhs[i] = bv(i, 0);
          const auto sol = lu_solve(McArith<K>{}, a, pv.piv, rhs);
          for (std::size_t i = 0; i < pv.n; ++i) xv(i, 0) = sol[i];
        },
        lm.data);
  });
}

int mpcore_mc_refine(const char* a_path, const char* b_path, int k, int long_bits,
                     const char* rtol, const char* atol, int max_iter,
                     mpcore_handle* report_out) {
  return guarded([&] {
    require_out(report_out);
    if (!a_path || !b_path) throw Status{MPCORE_E_PARSE, "null file path"};
    if (k < 2 || k > 4) throw Status{MPCORE_E_DIMENSION, "component count must be 2, 3 or 4"};
    RefineConfig cfg = default_refine_config(k);
    cfg.long_bits = long_bits;
    if (long_bits < 2) throw Status{MPCORE_E_INTERNAL, "long_bits out of range"};
    const PrecisionContext ctx{long_bits};
    if (rtol) cfg.rtol = bf_parse(rtol, ctx);
    if (atol) cfg.atol = bf_parse(atol, ctx);
    cfg.max_iter = max_iter;
    cfg.lanes = default_lane_mode();
    const DenseMatrix<BigFloat> a = round_to(load_bigfloat_matrix(a_path), ctx);
    const Vector<BigFloat> b = round_to(load_bigfloat_vector(b_path), ctx);
    ReportObj r{iterative_refinement(a, b, cfg)};
    *report_out = insert_object(std::move(r));
  });
}

int mpcore_report_iterations(mpcore_handle report, size_t* out) {
  return guarded([&] {
    require_out(out);
    Access acc(lookup(report), false);
    *out = payload_as<ReportObj>(*acc, "refine report").report.iterations;
  });
}

int mpcore_report_stop_reason(mpcore_handle report, int* out) {
  return guarded([&] {
    require_out(out);
    Access acc(lookup(report), false);
    switch (payload_as<ReportObj>(*acc, "refine report").report.stop_reason) {
      case StopReason::kConverged: *out = MPCORE_STOP_CONVERGED; break;
      case StopReason::kMaxIter: *out = MPCORE_STOP_MAX_ITER; break;
      case StopReason::kStagnated: *out = MPCORE_STOP_STAGNATED; break;
    }
  });
}

int mpcore_report_solution_length(mpcore_handle report, size_t* out) {
  return guarded([&] {
    require_out(out);
    Access acc(lookup(report), false);
    *out = payload_as<ReportObj>(*acc, "refine report").report.solution.size();
  });
}

int mpcore_report_solution_text(mpcore_handle report, size_t i, char* buf, size_t buf_len,
                                size_t* needed) {
  return guarded([&] {
    Access acc(lookup(report), false);
    const auto& sol = payload_as<ReportObj>(*acc, "refine report").report.solution;
    if (i >= sol.size()) throw Status{MPCORE_E_DIMENSION, "solution index out of range"};
    const std::string text = bf_format_hex(sol[i]);
    if (needed) *needed = text.size() + 1;
    if (!buf || buf_len < text.size() + 1) {
      throw Status{MPCORE_E_DIMENSION, "text buffer too small"};
    }
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

int mpcore_report_solution_binary64(mpcore_handle report, size_t i, double* out) {
  return guarded([&] {
    require_out(out);
    Access acc(lookup(report), false);
    const auto& sol = payload_as<ReportObj>(*acc, "refine report").report.solution;
    if (i >= sol.size()) throw Status{MPCORE_E_DIMENSION, "solution index out of range"};
    *out = bf_to_binary64(sol[i]);
  });
}

int mpcore_report_residual_count(mpcore_handle report, size_t* out) {
  return guarded([&] {
    require_out(out);
    Access acc(lookup(report), false);
    *out = payload_as<ReportObj>(*acc, "refine report").report.residual_history.size();
  });
}

int mpcore_report_residual_binary64(mpcore_handle report, size_t i, double* out) {
  return guarded([&] {
    require_out(out);
    Access acc(lookup(report), false);
    const auto& h = payload_as<ReportObj>(*acc, "refine report").report.residual_history;
    if (i >= h.size()) throw Status{MPCORE_E_DIMENSION, "residual index out of range"};
    *out = bf_to_binary64(h[i]);
  });
}

}  // extern "C"
