#pragma once

// JSON files for kernels and custom laws.

#include <string>

#include "json.hpp"

#include "chaoskit/distributions.hpp"
#include "chaoskit/kernels.hpp"

namespace chaoskit {

/// {"n", "d", "entries": [{"idx", "val"[, "w"]}], "exact_c2"}; "w" and
/// "exact_c2" appear for exact kernels only.
nlohmann::ordered_json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const nlohmann::json& j);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

Kernel load_kernel(const std::string& path);
void save_kernel(const Kernel& k, const std::string& path);

/// A registered name, or a .json file {"name", "moments": [...]} whose
/// entries are rational strings or numbers (m_0 first).
ClassicalDist resolve_classical_law(const std::string& spec);
/// As above; the file may give "moments" or "cumulants" (index 0 ignored).
FreeDist resolve_free_law(const std::string& spec);

nlohmann::ordered_json number_to_json(const Number& x);
nlohmann::ordered_json classical_law_to_json(const ClassicalDist& law);
nlohmann::ordered_json free_law_to_json(const FreeDist& law);

}  // namespace chaoskit
