#include "onlineid/trace_io.hpp"

#include <cmath>
#include <string>

#include "onlineid/csv.hpp"
#include "onlineid/errors.hpp"
#include "onlineid/truth.hpp"

namespace onlineid::io {

namespace {

const std::vector<std::string> kTraceHeader = {
    "t",      "e_Q2",    "r_X2",     "p_X2",    "rd_X2",   "mu",         "nu",
    "tstar_flag", "e_Q", "r_X",      "r_Vtil",  "r_VXtil", "p_X",        "p_Vhat",
    "p_VXhat", "d_X",    "d_Vtil",   "rd_X",    "rd_Vtil", "rd_VXtil",   "dtil_X",
    "Pustar_Vhat", "mu_active", "z_Z", "noise_Z", "cond_rhs"};

std::vector<double> sample_points(int samples) {
  std::vector<double> x(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(i) / (samples - 1);
  x.back() = 1.0;
  return x;
}

}  // namespace

void write_trace(std::ostream& out, const est::RunTrace& trace) {
  CsvWriter w(out, kTraceHeader);
  for (const auto& r : trace.records) {
    const auto& n = r.norms;
    const double row[] = {r.t,         n.e_q * n.e_q,   n.r_x * n.r_x, n.p_x * n.p_x,
                          n.rd_x * n.rd_x, r.mu,        r.nu,          r.tstar_flag ? 1.0 : 0.0,
                          n.e_q,       n.r_x,           n.r_vtil,      n.r_vxtil,
                          n.p_x,       n.p_vhat,        n.p_vxhat,     n.d_x,
                          n.d_vtil,    n.rd_x,          n.rd_vtil,     n.rd_vxtil,
                          n.dtil_x,    r.pustar_vhat,   r.mu_active ? 1.0 : 0.0,
                          r.z_z,       r.noise_z,       r.cond_rhs};
    w.row(row);
  }
}

std::vector<est::TraceRecord> read_trace(std::istream& in) {
  const CsvTable t = read_csv(in);
  std::vector<std::size_t> col;
  for (const auto& name : kTraceHeader) col.push_back(t.column(name));
  std::vector<est::TraceRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto v = [&](std::size_t k) { return t.number(i, col[k]); };
    est::TraceRecord r;
    r.t = v(0);
    r.mu = v(5);
    r.nu = v(6);
    r.tstar_flag = v(7) != 0.0;
    auto& n = r.norms;
    n.e_q = v(8);
    n.r_x = v(9);
    n.r_vtil = v(10);
    n.r_vxtil = v(11);
    n.p_x = v(12);
    n.p_vhat = v(13);
    n.p_vxhat = v(14);
    n.d_x = v(15);
    n.d_vtil = v(16);
    n.rd_x = v(17);
    n.rd_vtil = v(18);
    n.rd_vxtil = v(19);
    n.dtil_x = v(20);
    r.pustar_vhat = v(21);
    r.mu_active = v(22) != 0.0;
    r.z_z = v(23);
    r.noise_z = v(24);
    r.cond_rhs = v(25);
    out.push_back(r);
  }
  return out;
}

void write_snapshots(std::ostream& out, const est::RunTrace& trace, int samples) {
  CsvWriter w(out, {"t", "x", "q_hat", "u_hat", "q_star", "u_star"});
  const auto xs = sample_points(samples);
  for (const auto& s : trace.snapshots) {
    for (double x : xs) {
      const double row[] = {s.t, x, s.q_hat.value(x), s.u_hat.value(x),
                            trace.q_star.value(x), s.u_star.value(x)};
      w.row(row);
    }
  }
}

void write_truth_snapshots(std::ostream& out, const std::vector<double>& times,
                           const std::vector<fem::HermiteField>& u_star,
                           const fem::HermiteField& q_star, int samples) {
  CsvWriter w(out, {"t", "x", "q_star", "u_star"});
  const auto xs = sample_points(samples);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (double x : xs) {
      const double row[] = {times[k], x, q_star.value(x), u_star[k].value(x)};
      w.row(row);
    }
  }
}

void write_observations(std::ostream& out, const est::RunTrace& trace) {
  CsvWriter w(out, {"t", "z_Z", "noise_Z", "d_Vtil", "tstar_flag"});
  for (const auto& r : trace.records) {
    const double row[] = {r.t, r.z_z, r.noise_z, r.norms.d_vtil, r.tstar_flag ? 1.0 : 0.0};
    w.row(row);
  }
}

void write_trajectory(std::ostream& out, const est::RunTrace& trace) {
  const int n = trace.q_star.mesh().n_dofs();
  std::vector<std::string> header = {"t", "field"};
  for (int i = 0; i < n; ++i) header.push_back("d" + std::to_string(i));
  CsvWriter w(out, header);
  auto emit = [&](double t, const char* name, const fem::HermiteField& f) {
    std::vector<std::string> cells = {format_double(t), name};
    for (int i = 0; i < n; ++i) cells.push_back(format_double(f.dofs()[i]));
    w.row(cells);
  };
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    emit(trace.records[k].t, "u_hat", trace.u_hat[k]);
    emit(trace.records[k].t, "u_star", trace.u_star[k]);
  }
}

StoredTrajectory read_trajectory(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t tc = t.column("t");
  const std::size_t fc = t.column("field");
  const std::size_t n = t.header.size() - 2;
  if (n < 6 || n % 2 != 0) throw InputError("trajectory: bad number of coefficient columns");
  StoredTrajectory out;
  out.n_nodes = static_cast<int>(n / 2);
  const fem::Mesh1D mesh(out.n_nodes);
  std::vector<std::size_t> dc;
  for (std::size_t i = 0; i < n; ++i) dc.push_back(t.column("d" + std::to_string(i)));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = t.number(r, dc[i]);
    const std::string& field = t.rows[r][fc];
    if (field == "u_hat") {
      out.times.push_back(t.number(r, tc));
      out.u_hat.emplace_back(mesh, std::move(d), fem::Boundary::Free);
    } else if (field == "u_star") {
      out.u_star.emplace_back(mesh, std::move(d), fem::Boundary::Free);
    } else {
      throw InputError("trajectory: unknown field '" + field + "'");
    }
  }
  if (out.u_hat.size() != out.u_star.size() || out.times.size() < 2) {
    throw InputError("trajectory: need matching u_hat and u_star rows for 2+ steps");
  }
  out.time_step = out.times[1] - out.times[0];
  return out;
}

void write_score_header(std::ostream& out, const std::vector<std::string>& names) {
  std::vector<std::string> header = names;
  header.insert(header.end(), {"score", "status", "message"});
  CsvWriter w(out, header);
}

void write_score_row(std::ostream& out, const gains::ScoreEntry& e) {
  for (double v : e.point) out << format_double(v) << ',';
  std::string msg = e.message;
  for (char& ch : msg) {
    if (ch == ',' || ch == '\n') ch = ';';
  }
  out << format_double(e.score) << ',' << (e.ok ? "ok" : "failed") << ',' << msg << '\n';
  out.flush();
}

void write_pe_report(std::ostream& out, const diag::PEProbeReport& r) {
  CsvWriter w(out, {"t_a", "direction", "best_t_b", "value"});
  for (const auto& p : r.pairs) {
    const double row[] = {p.t_a, static_cast<double>(p.direction), p.best_t_b, p.value};
    w.row(row);
  }
}

}  // namespace onlineid::io
