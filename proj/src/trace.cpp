#include "zmd/trace.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include <fmt/format.h>

namespace zmd {

std::string csv_header(int rotor_count) {
  std::string h =
      "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz,epx,epy,epz,roll_d,pitch_d,yaw_d,fdx,fdy,fdz,f";
  for (int i = 1; i <= rotor_count; ++i) h += fmt::format(",u{}", i);
  for (int i = 1; i <= rotor_count; ++i) h += fmt::format(",s{}", i);
  return h;
}

void write_csv(std::ostream& out, const SimTrace& trace) {
  out << csv_header(trace.rotor_count) << '\n';
  fmt::memory_buffer buf;
  auto put = [&buf](double x) { fmt::format_to(std::back_inserter(buf), ",{:.12g}", x); };
  for (const TraceRecord& r : trace.records) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{:.12g}", r.t);
    const RigidBodyState& s = r.state;
    for (double x : {s.p.x(), s.p.y(), s.p.z(), s.q.eta, s.q.eps.x(), s.q.eps.y(), s.q.eps.z(),
                     s.v.x(), s.v.y(), s.v.z(), s.omega.x(), s.omega.y(), s.omega.z(),
                     r.e_p.x(), r.e_p.y(), r.e_p.z(), r.rpy_delta.x(), r.rpy_delta.y(),
                     r.rpy_delta.z(), r.f_delta.x(), r.f_delta.y(), r.f_delta.z(), r.f}) {
      put(x);
    }
    for (double x : r.u) put(x);
    for (double x : r.speeds) put(x);
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

std::optional<double> settling_time(const std::vector<double>& t, const std::vector<double>& err,
                                    double threshold) {
  if (t.empty()) return std::nullopt;
  std::size_t first_ok = t.size();
  for (std::size_t i = t.size(); i-- > 0;) {
    if (!(err[i] < threshold)) break;
    first_ok = i;
  }
  if (first_ok == t.size()) return std::nullopt;
  return t[first_ok];
}

TraceSummary summarize(const SimTrace& trace, double mass, double gravity, double threshold) {
  TraceSummary s;
  if (trace.records.empty()) return s;
  std::vector<double> t, err;
  t.reserve(trace.records.size());
  err.reserve(trace.records.size());
  for (const TraceRecord& r : trace.records) {
    t.push_back(r.t);
    err.push_back(r.e_p.norm());
    if (r.speeds.size() > 0) s.max_rotor_speed = std::max(s.max_rotor_speed, r.speeds.maxCoeff());
  }
  s.settling_time = settling_time(t, err, threshold);
  const TraceRecord& last = trace.records.back();
  s.thrust_error = std::abs(last.f - mass * gravity) / (mass * gravity);
  if (last.reference_alignment) s.final_alignment = std::abs(*last.reference_alignment);
  return s;
}

}  // namespace zmd
