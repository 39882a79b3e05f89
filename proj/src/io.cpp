#include "acd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "acd/errors.hpp"

namespace acd {

std::string format_g17(double v) { return fmt::format("{:.17g}", v); }

void write_series_csv(std::ostream& out, const DurationSeries& series) {
  out << "i,x\n";
  out << "0," << format_g17(series.x0) << '\n';
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    out << (i + 1) << ',' << format_g17(series.x[i]) << '\n';
  }
}

void write_series_csv(const std::string& path, const DurationSeries& series) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, fmt::format("cannot write '{}'", path));
  write_series_csv(out, series);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

SeriesFile read_series_csv(std::istream& in, double t_span) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Ingest, "series file is empty");
  const auto header = split_csv(line);
  int col_i = -1, col_x = -1, col_day = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "i") col_i = static_cast<int>(k);
    if (header[k] == "x") col_x = static_cast<int>(k);
    if (header[k] == "day") col_day = static_cast<int>(k);
  }
  if (col_i < 0 || col_x < 0) throw Error(ErrorKind::Ingest, "series header must contain columns 'i' and 'x'");

  SeriesFile out;
  out.series.t_span = t_span;
  bool have_x0 = false;
  long expected = 0;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    long idx = 0;
    double x = 0.0;
    if (cells.size() < header.size() || !parse_number(cells[static_cast<std::size_t>(col_i)], idx) ||
        !parse_number(cells[static_cast<std::size_t>(col_x)], x)) {
      throw Error(ErrorKind::Ingest, fmt::format("series row {}: cannot parse '{}'", row, line));
    }
    if (idx != expected) {
      throw Error(ErrorKind::Ingest, fmt::format("series row {}: index {} out of order (expected {})", row, idx, expected));
    }
    ++expected;
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::Ingest, fmt::format("series row {}: duration {} is not positive", row, x));
    }
    if (col_day >= 0) {
      long d = 0;
      if (!parse_number(cells[static_cast<std::size_t>(col_day)], d)) {
        throw Error(ErrorKind::Ingest, fmt::format("series row {}: bad day label", row));
      }
      out.day.push_back(d);
    }
    if (idx == 0) {
      out.series.x0 = x;
      have_x0 = true;
    } else {
      out.series.x.push_back(x);
    }
  }
  if (!have_x0) throw Error(ErrorKind::Ingest, "series file has no initial value row (i = 0)");
  return out;
}

std::vector<std::size_t> daily_resets(const std::vector<long>& day) {
  std::vector<std::size_t> resets;
  for (std::size_t k = 1; k < day.size(); ++k) {
    if (day[k] != day[k - 1]) resets.push_back(k - 1);
  }
  return resets;
}

SeriesFile read_series_csv(const std::string& path, double t_span) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Ingest, fmt::format("cannot open '{}'", path));
  return read_series_csv(in, t_span);
}

namespace {

nlohmann::json row_major(const Eigen::Matrix3d& m) {
  auto a = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

Eigen::Matrix3d matrix_from(const nlohmann::json& a) {
  if (!a.is_array() || a.size() != 9) throw Error(ErrorKind::Ingest, "expected a 9-element row-major matrix");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = a.at(static_cast<std::size_t>(3 * r + c)).get<double>();
  return m;
}

}  // namespace

nlohmann::json to_json(const FitResult& fit, bool include_residuals) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["theta"] = {{"omega", fit.theta_hat.omega}, {"alpha", fit.theta_hat.alpha}, {"beta", fit.theta_hat.beta}};
  j["loglik"] = fit.loglik;
  j["score"] = {fit.score[0], fit.score[1], fit.score[2]};
  j["info"] = row_major(fit.info);
  j["opg"] = row_major(fit.opg);
  j["sigma2_eps_hat"] = fit.sigma2_eps_hat;
  j["n"] = fit.n;
  j["t_span"] = fit.t_span;
  j["restricted"] = fit.restricted;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["grad_norm"] = fit.grad_norm;
  j["psi0_rule"] = to_string(fit.psi0_rule);
  if (include_residuals) j["residuals"] = fit.residuals;
  return j;
}

FitResult fit_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error(ErrorKind::Ingest, "unsupported fit schema version");
    }
    FitResult f;
    const auto& t = j.at("theta");
    f.theta_hat = {t.at("omega").get<double>(), t.at("alpha").get<double>(), t.at("beta").get<double>()};
    f.loglik = j.at("loglik").get<double>();
    const auto& s = j.at("score");
    f.score = Eigen::Vector3d(s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>());
    f.info = matrix_from(j.at("info"));
    f.opg = matrix_from(j.at("opg"));
    f.sigma2_eps_hat = j.at("sigma2_eps_hat").get<double>();
    f.n = j.at("n").get<std::size_t>();
    f.t_span = j.at("t_span").get<double>();
    f.restricted = j.at("restricted").get<bool>();
    f.converged = j.at("converged").get<bool>();
    f.iterations = j.value("iterations", 0);
    f.grad_norm = j.value("grad_norm", 0.0);
    f.psi0_rule = psi0_rule_from_string(j.value("psi0_rule", std::string("x0")));
    if (j.contains("residuals")) f.residuals = j.at("residuals").get<std::vector<double>>();
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Ingest, fmt::format("malformed fit JSON: {}", e.what()));
  }
}

nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["tau"] = r.tau;
  j["qlr"] = r.qlr;
  j["qlr_normalized"] = r.qlr_normalized;
  j["sigma_hat"] = row_major(r.sigma_hat);
  j["sigma_method"] = to_string(r.sigma_method);
  j["se_theta"] = {r.se_theta[0], r.se_theta[1], r.se_theta[2]};
  j["alpha_plus_beta"] = r.sum;
  j["se_sum"] = r.se_sum;
  j["p_two_sided"] = r.p_two_sided;
  j["p_left"] = r.p_left;
  j["p_right"] = r.p_right;
  j["p_qlr"] = r.p_qlr;
  j["eta"] = r.eta;
  j["decisions"] = {{"iacd_two_sided_tau", r.decisions.iacd_tau},
                    {"iacd_two_sided_qlr", r.decisions.iacd_qlr},
                    {"infinite_mean_left", r.decisions.infinite_mean},
                    {"finite_sum_leq1_right", r.decisions.finite_sum_leq1}};
  return j;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Ingest, fmt::format("cannot open '{}'", path));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Ingest, fmt::format("'{}' is not valid JSON: {}", path, e.what()));
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Config, fmt::format("cannot write '{}'", path));
  out << j.dump(2) << '\n';
}

}  // namespace acd
