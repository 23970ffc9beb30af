// Copyright 2026 The ncgopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ncgopt/solvers.hpp"

namespace ncgopt {

inline constexpr const char* kTraceHeader =
    "iter,f,grad_norm,step_kind,rayleigh,noise_level,hvp_cum,grad_cum,wall_ns";

/// Shortest round-trip-safe text for a double (17 significant digits).
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << kTraceHeader << '\n';
  for (const TraceRow& r : trace.rows) {
    os << r.iter << ',' << format_double(r.f) << ',' << format_double(r.grad_norm) << ','
       << to_string(r.step_kind) << ',' << (r.rayleigh ? format_double(*r.rayleigh) : "") << ','
       << (r.noise_level ? format_double(*r.noise_level) : "") << ',' << r.hvp_cum << ','
       << r.grad_cum << ',' << r.wall_ns << '\n';
  }
}

inline std::string trace_csv(const RunTrace& trace) {
  std::ostringstream os;
  write_trace_csv(os, trace);
  return os.str();
}

inline TraceKind parse_trace_kind(const std::string& s) {
  if (s == "Curvature") return TraceKind::Curvature;
  if (s == "Gradient") return TraceKind::Gradient;
  if (s == "AGD") return TraceKind::AGD;
  if (s == "Return") return TraceKind::Return;
  throw InputError("unknown step kind '" + s + "'");
}

/// Inverse of write_trace_csv.
inline RunTrace read_trace_csv(std::istream& is) {
  RunTrace trace;
  std::string line;
  if (!std::getline(is, line) || line != kTraceHeader) throw InputError("bad trace header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 9) throw InputError("bad trace row: " + line);
    TraceRow r;
    r.iter = std::stoull(f[0]);
    r.f = std::stod(f[1]);
    r.grad_norm = std::stod(f[2]);
    r.step_kind = parse_trace_kind(f[3]);
    if (!f[4].empty()) r.rayleigh = std::stod(f[4]);
    if (!f[5].empty()) r.noise_level = std::stod(f[5]);
    r.hvp_cum = std::stoull(f[6]);
    r.grad_cum = std::stoull(f[7]);
    r.wall_ns = std::stoll(f[8]);
    trace.rows.push_back(r);
  }
  return trace;
}

}  // namespace ncgopt
