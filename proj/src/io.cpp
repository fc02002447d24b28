#include "stlc/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "stlc/errors.hpp"

namespace stlc {

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  if (b == e) return false;
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

}  // namespace

std::string config_hash(const nlohmann::json& config) {
  const std::string text = config.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot write " + tmp.string());
    f << content;
    if (!f) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string csv_header_comment(const ArtifactMeta& meta) {
  return "# stlc " + meta.version + " config_hash=" + meta.config_hash + "\n";
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      double v;
      if (!parse_double(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (!header_seen && rows.empty()) {
        header_seen = true;
        continue;
      }
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string control_csv(const ControlSignal& u, const ArtifactMeta& meta, double time_offset) {
  std::string out = csv_header_comment(meta);
  out += "t,u\n";
  const Eigen::VectorXd s = u.samples();
  for (int i = 0; i < u.grid().nodes(); ++i) out += num(time_offset + u.grid().t(i)) + "," + num(s[i]) + "\n";
  return out;
}

nlohmann::json control_sidecar(const ControlSignal& u, const Settings& cfg, const ArtifactMeta& meta) {
  nlohmann::json j;
  j["k"] = u.order();
  j["T"] = u.grid().T;
  j["n_steps"] = u.grid().n_steps;
  j["in_H0k"] = u.in_h0k(cfg);
  std::vector<double> bc;
  for (int m = 0; m < u.order(); ++m) bc.push_back(u.terminal(m));
  j["terminal_derivatives"] = bc;
  return with_meta(j, meta);
}

ControlSignal read_control_csv(const std::filesystem::path& path) {
  const auto rows = read_numeric_csv(path);
  if (rows.size() < 2) throw InvalidArgument(path.string() + ": a control needs at least two rows");
  Eigen::VectorXd u(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) throw InvalidArgument(path.string() + ": expected two columns (t, u)");
    u[i] = rows[i][1];
  }
  const int n = static_cast<int>(rows.size()) - 1;
  const double t0 = rows.front()[0];
  const double T = rows.back()[0] - t0;
  const TimeGrid grid(T, n);
  for (int i = 0; i <= n; ++i) {
    if (std::abs(rows[i][0] - t0 - grid.t(i)) > 1e-9 * std::max(1.0, T)) {
      throw InvalidArgument(path.string() + ": time column is not a uniform grid");
    }
  }
  return ControlSignal::from_samples(grid, u);
}

std::string trajectory_csv(const Trajectory& traj, const TimeGrid& grid, const ArtifactMeta& meta, int stride,
                           double time_offset) {
  std::string out = csv_header_comment(meta);
  out += "t";
  const int J = traj.empty() ? 0 : traj.front().size();
  for (int j = 1; j <= J; ++j) out += ",re_c" + std::to_string(j) + ",im_c" + std::to_string(j);
  out += "\n";
  stride = std::max(stride, 1);
  for (int i = 0; i < static_cast<int>(traj.size()); ++i) {
    if (i % stride != 0 && i + 1 != static_cast<int>(traj.size())) continue;
    out += num(time_offset + grid.t(i));
    for (int j = 0; j < J; ++j) out += "," + num(traj[i].coeffs[j].real()) + "," + num(traj[i].coeffs[j].imag());
    out += "\n";
  }
  return out;
}

std::string dipole_csv(const DipoleOperator& D, const ArtifactMeta& meta) {
  std::string out = csv_header_comment(meta);
  out += "j,k,value\n";
  for (int j = 0; j < D.matrix.rows(); ++j) {
    for (int k = 0; k < D.matrix.cols(); ++k) {
      out += std::to_string(j + 1) + "," + std::to_string(k + 1) + "," + num(D.matrix(j, k)) + "\n";
    }
  }
  return out;
}

MomentVector read_moment_targets(const std::filesystem::path& path, int ladder_size) {
  const auto rows = read_numeric_csv(path);
  int npoly = 0;
  for (const auto& r : rows) {
    if (r.size() != 3) throw InvalidArgument(path.string() + ": expected three columns (index, re, im)");
    if (r[0] != std::floor(r[0])) throw InvalidArgument(path.string() + ": non-integer index");
    const int idx = static_cast<int>(r[0]);
    if (idx >= ladder_size) throw InvalidArgument(path.string() + ": index " + std::to_string(idx) + " beyond the ladder");
    if (idx < 0) npoly = std::max(npoly, -idx);
  }
  MomentVector d = MomentVector::zero(ladder_size, npoly);
  for (const auto& r : rows) {
    const int idx = static_cast<int>(r[0]);
    if (idx >= 0) {
      d.d[idx] = cdouble(r[1], r[2]);
    } else {
      if (r[2] != 0.0) throw InvalidArgument(path.string() + ": polynomial targets are real");
      d.poly[-idx - 1] = r[1];
    }
  }
  return d;
}

nlohmann::json to_json(const SolverReport& r) {
  nlohmann::json j;
  j["method"] = r.method;
  j["residuals"] = r.residuals;
  j["max_residual"] = r.max_residual;
  j["target_scale"] = r.target_scale;
  nlohmann::json norms = nlohmann::json::object();
  for (const auto& [m, v] : r.norms) norms[std::to_string(m)] = v;
  j["norms"] = norms;
  j["bc_values"] = r.bc_values;
  j["iterations"] = r.iterations;
  j["rho"] = r.rho;
  j["N"] = r.N;
  j["residual_history"] = r.residual_history;
  j["converged"] = r.converged;
  return j;
}

nlohmann::json to_json(const SynthesisReport& r) {
  nlohmann::json j;
  auto per_m = [](const std::map<int, double>& m) {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& [k, v] : m) o[std::to_string(k)] = v;
    return o;
  };
  j["control_norms"] = per_m(r.control_norms);
  j["data_norms"] = per_m(r.data_norms);
  j["ratios"] = per_m(r.ratios);
  j["bc_values"] = r.bc_values;
  j["history"] = r.history;
  j["rho"] = r.rho;
  j["iterations"] = r.iterations;
  j["final_error"] = r.final_error;
  j["mode1_real"] = r.mode1_real;
  j["converged"] = r.converged;
  j["moment_report"] = to_json(r.moment_report);
  return j;
}

nlohmann::json state_to_json(const ModalState& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (int j = 0; j < s.size(); ++j) arr.push_back({s.coeffs[j].real(), s.coeffs[j].imag()});
  return arr;
}

ModalState state_from_json(const nlohmann::json& j, int j_max) {
  if (j.is_string()) {
    if (j.get<std::string>() == "ground") return ModalState::unit(j_max, 1);
    throw InvalidArgument("unknown state '" + j.get<std::string>() + "'");
  }
  if (!j.is_array() || static_cast<int>(j.size()) > j_max) throw InvalidArgument("state must be a list of at most j_max [re, im] pairs");
  ModalState s = ModalState::zero(j_max);
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& c = j[i];
    if (c.is_number()) {
      s.coeffs[i] = c.get<double>();
    } else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) {
      s.coeffs[i] = cdouble(c[0].get<double>(), c[1].get<double>());
    } else {
      throw InvalidArgument("state entry " + std::to_string(i + 1) + " must be [re, im]");
    }
  }
  return s;
}

nlohmann::json with_meta(nlohmann::json body, const ArtifactMeta& meta) {
  body["meta"] = {{"config_hash", meta.config_hash}, {"version", meta.version}, {"tool", "stlc"}};
  return body;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace stlc
