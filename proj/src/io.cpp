#include "chaoskit/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "chaoskit/error.hpp"

namespace chaoskit {

namespace {

using ojson = nlohmann::ordered_json;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Rational json_rational(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number()) return parse_rational(format_double(v.get<double>()));
  throw Error(ErrorCode::ParseError, "expected a number or rational string");
}

std::vector<Surd> json_surds(const nlohmann::json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::ParseError, "expected an array of numbers");
  std::vector<Surd> out;
  for (const auto& v : arr) out.emplace_back(json_rational(v));
  return out;
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
}

ojson surd_list(const std::vector<Surd>& xs, std::size_t from) {
  ojson arr = ojson::array();
  for (std::size_t i = from; i < xs.size(); ++i) arr.push_back(xs[i].str());
  return arr;
}

}  // namespace

ojson kernel_to_json(const Kernel& k) {
  ojson j;
  j["n"] = k.n();
  j["d"] = k.degree();
  ojson entries = ojson::array();
  for (std::size_t t = 0; t < k.size(); ++t) {
    ojson e;
    e["idx"] = std::vector<int>(k.tuple(t).begin(), k.tuple(t).end());
    e["val"] = k.value(t);
    if (k.is_exact()) e["w"] = to_string(k.weight(t));
    entries.push_back(e);
  }
  j["entries"] = entries;
  if (k.is_exact()) j["exact_c2"] = to_string(k.c2());
  return j;
}

Kernel kernel_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int d = j.at("d").get<int>();
    if (d < 1 || n < d) throw Error(ErrorCode::BadFamilyParams, "kernel file needs 1 <= d <= n");
    const auto& entries = j.at("entries");
    if (!entries.is_array() || entries.empty()) throw Error(ErrorCode::AllDiagonal, "kernel file has no entries");
    const bool exact = j.contains("exact_c2") && !j["exact_c2"].is_null();
    std::vector<int> indices;
    std::vector<double> values;
    std::vector<Rational> weights;
    std::set<std::vector<int>> seen;
    for (const auto& e : entries) {
      auto idx = e.at("idx").get<std::vector<int>>();
      if (static_cast<int>(idx.size()) != d) throw Error(ErrorCode::ShapeMismatch, "entry with wrong tuple length");
      for (std::size_t p = 0; p < idx.size(); ++p) {
        if (idx[p] < 0 || idx[p] >= n) throw Error(ErrorCode::BadIndex, "index out of range in kernel file");
        if (p > 0 && idx[p] <= idx[p - 1]) throw Error(ErrorCode::BadIndex, "tuple indices must be strictly increasing");
      }
      if (!seen.insert(idx).second) throw Error(ErrorCode::ParseError, "duplicate tuple in kernel file");
      indices.insert(indices.end(), idx.begin(), idx.end());
      if (exact) {
        if (!e.contains("w")) throw Error(ErrorCode::ParseError, "exact kernels need a weight \"w\" on every entry");
        weights.push_back(json_rational(e["w"]));
      } else {
        values.push_back(e.at("val").get<double>());
      }
    }
    Kernel k = exact ? Kernel(n, d, std::move(indices), std::move(weights), json_rational(j["exact_c2"]))
                     : Kernel(n, d, std::move(indices), std::move(values));
    if (k.is_exact()) {
      Rational norm = 0;
      for (std::size_t t = 0; t < k.size(); ++t) norm += k.weight(t) * k.weight(t);
      Rational dfact = factorial(static_cast<unsigned>(d));
      if (dfact * dfact * k.c2() * norm != 1) throw Error(ErrorCode::NotStandardized, "kernel file is not normalized");
    }
    if (normalization_residual(k) > 1e-9) throw Error(ErrorCode::NotStandardized, "kernel file is not normalized");
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("kernel file: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

Kernel load_kernel(const std::string& path) { return kernel_from_json(parse_json(read_file(path), path)); }

void save_kernel(const Kernel& k, const std::string& path) { write_file(path, kernel_to_json(k).dump(2) + "\n"); }

ClassicalDist resolve_classical_law(const std::string& spec) {
  if (!ends_with(spec, ".json")) return classical_law(spec);
  auto j = parse_json(read_file(spec), spec);
  try {
    return classical_from_moments(j.value("name", spec), json_surds(j.at("moments")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, spec + ": " + e.what());
  }
}

FreeDist resolve_free_law(const std::string& spec) {
  if (!ends_with(spec, ".json")) return free_law(spec);
  auto j = parse_json(read_file(spec), spec);
  try {
    std::string name = j.value("name", spec);
    if (j.contains("cumulants")) return free_from_cumulants(name, json_surds(j["cumulants"]));
    return free_from_moments(name, json_surds(j.at("moments")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, spec + ": " + e.what());
  }
}

ojson number_to_json(const Number& x) {
  if (x.is_exact()) return x.str();
  return x.approx;
}

ojson classical_law_to_json(const ClassicalDist& law) {
  ojson j;
  j["name"] = law.name;
  j["moments"] = surd_list(law.moments, 0);
  j["standardized"] = law.standardized();
  j["symmetric"] = law.symmetric();
  if (law.max_order() >= 4 && law.standardized()) j["chi4"] = chi4(law).str();
  j["has_sampler"] = law.sampler != Sampler::None;
  j["outside_theorem_class"] = law.outside_theorem_class();
  return j;
}

ojson free_law_to_json(const FreeDist& law) {
  ojson j;
  j["name"] = law.name;
  j["moments"] = surd_list(law.moments, 0);
  j["cumulants"] = surd_list(law.cumulants, 1);
  j["standardized"] = law.standardized();
  if (law.max_order() >= 4 && law.standardized()) j["kappa4"] = kappa4(law).str();
  j["outside_theorem_class"] = law.outside_theorem_class();
  return j;
}

}  // namespace chaoskit
