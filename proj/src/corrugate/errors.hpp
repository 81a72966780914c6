// Copyright (c) 2026 the corrugate authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace corrugate {

enum class Errc {
  invalid_argument,
  unknown_catalog_entry,
  missing_parameter,
  order_unsupported,
  curvature_vanishes,
  non_orthogonal_seed,
  irregular_curve,
  out_of_domain,
  not_short,
  amplitude_degenerate,
  length_mismatch,
  frame_nodes_missing,
  out_of_order,
  not_psd,
  too_large,
  too_few_samples,
  insufficient_points,
  non_positive_value,
  shape_mismatch,
  resource_budget,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace corrugate
