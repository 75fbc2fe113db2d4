#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "vso/model.hpp"

namespace vso {

namespace {

constexpr std::string_view kArrow = "→";

bool valid_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '.' || c == '-';
}

class Checker {
 public:
  explicit Checker(const Catalog& catalog) : catalog_(catalog) {}

  ValidationReport run() {
    for (const auto& [key, sp] : catalog_.software_packages) check(key, sp);
    for (const auto& [key, ip] : catalog_.implementing_packages) check(key, ip);
    for (const auto& [key, method] : catalog_.methods) check(key, method);
    for (const auto& [key, model] : catalog_.models) check(key, model);
    for (const auto& [key, image] : catalog_.images) check(key, image);
    check_containment();
    for (const auto& [a, b] : catalog_.registry.assertions()) {
      if (a.empty() || b.empty()) add("InvalidUri", "sameAs(" + a.str() + ", " + b.str() + ")");
    }
    std::sort(report_.violations.begin(), report_.violations.end());
    report_.violations.erase(
        std::unique(report_.violations.begin(), report_.violations.end()),
        report_.violations.end());
    return std::move(report_);
  }

 private:
  void add(std::string code, std::string detail) {
    report_.violations.push_back(Violation{std::move(code), std::move(detail)});
  }

  void check_id(const std::string& key, const std::string& id) {
    if (!is_valid_id(id)) add("InvalidId", "'" + id + "'");
    if (key != id) add("InvalidId", "'" + id + "' stored under key '" + key + "'");
  }

  template <class Params>
  void check_varnames(const std::string& owner, const Params& params) {
    std::set<std::string> seen;
    for (const auto& p : params) {
      if (!is_valid_id(p.varname)) add("InvalidVarname", owner + ".'" + p.varname + "'");
      if (!seen.insert(p.varname).second) add("DuplicateParam", owner + "." + p.varname);
    }
  }

  void check(const std::string& key, const SoftwarePackage& sp) {
    check_id(key, sp.id);
    if (sp.inputs.empty()) add("MissingInput", sp.id);
    if (sp.outputs.empty()) add("MissingOutput", sp.id);
    check_varnames(sp.id, sp.inputs);
    check_varnames(sp.id, sp.outputs);
    if (sp.perf) {
      const auto& perf = *sp.perf;
      auto bad = [](double v) { return !std::isfinite(v) || v < 0.0; };
      if (bad(perf.fixed_cost) || bad(perf.per_unit_cost)) add("InvalidPerformance", sp.id);
    }
  }

  void check(const std::string& key, const ImplementingPackage& ip) {
    check_id(key, ip.id);
    check_varnames(ip.id, ip.inputs);
    check_varnames(ip.id, ip.outputs);
    for (const auto& in : ip.inputs) {
      if (in.uri.empty()) add("MissingUri", ip.id + "." + in.varname);
    }
    for (const auto& out : ip.outputs) {
      if (out.uri.empty()) add("MissingUri", ip.id + "." + out.varname);
    }
    auto sp_it = catalog_.software_packages.find(ip.software_package);
    if (sp_it == catalog_.software_packages.end()) {
      add("DanglingReference", ip.id + std::string(kArrow) + ip.software_package);
      return;
    }
    const SoftwarePackage& sp = sp_it->second;
    for (const auto& in : ip.inputs) {
      if (!sp.find_input(in.varname)) {
        add("DanglingReference", ip.id + std::string(kArrow) + sp.id + "." + in.varname);
      }
    }
    for (const auto& out : ip.outputs) {
      if (!sp.find_output(out.varname)) {
        add("DanglingReference", ip.id + std::string(kArrow) + sp.id + "." + out.varname);
      }
    }
    for (const auto& in : sp.inputs) {
      if (!ip.find_input(in.varname)) {
        add("PartialInheritance", ip.id + " does not wrap " + sp.id + "." + in.varname);
      }
    }
    for (const auto& out : sp.outputs) {
      if (!ip.find_output(out.varname)) {
        add("PartialInheritance", ip.id + " does not wrap " + sp.id + "." + out.varname);
      }
    }
  }

  void check(const std::string& key, const Method& method) {
    check_id(key, method.id);
    if (method.packages.empty()) add("EmptySequence", method.id);
    for (const auto& ip : method.packages) {
      if (!catalog_.implementing_packages.contains(ip)) {
        add("DanglingReference", method.id + std::string(kArrow) + ip);
      }
    }
  }

  void check(const std::string& key, const SimulationModel& model) {
    check_id(key, model.id);
    if (model.methods.empty()) add("EmptyModel", model.id);
    for (const auto& m : model.methods) {
      if (!catalog_.methods.contains(m)) {
        add("DanglingReference", model.id + std::string(kArrow) + m);
      }
    }
    if (model.selected_method.empty()) {
      add("NoMethodSelected", model.id);
    } else if (!model.methods.contains(model.selected_method)) {
      add("SelectedMethodNotInModel", model.id + std::string(kArrow) + model.selected_method);
    }
  }

  void check(const std::string& key, const VsoImage& image) {
    check_id(key, image.id);
    std::set<std::string> names;
    for (const auto& prop : image.properties) {
      if (!is_valid_id(prop.name)) add("InvalidVarname", image.id + ".'" + prop.name + "'");
      if (!names.insert(prop.name).second) add("DuplicateParam", image.id + "." + prop.name);
      if (prop.uri.empty()) add("MissingUri", image.id + "." + prop.name);
    }
    for (const auto& m : image.models) {
      if (!catalog_.models.contains(m)) add("DanglingReference", image.id + std::string(kArrow) + m);
    }
    for (const auto& c : image.children) {
      if (!catalog_.images.contains(c)) add("DanglingReference", image.id + std::string(kArrow) + c);
    }
  }

  // Depth-first search over the children relation; every back edge closes
  // one reported cycle.
  void check_containment() {
    enum class Mark { fresh, active, done };
    std::map<std::string, Mark> marks;
    std::vector<std::string> path;

    std::function<void(const std::string&)> visit = [&](const std::string& id) {
      marks[id] = Mark::active;
      path.push_back(id);
      for (const auto& child : catalog_.images.at(id).children) {
        if (!catalog_.images.contains(child)) continue;
        const Mark mark = marks.contains(child) ? marks[child] : Mark::fresh;
        if (mark == Mark::active) {
          std::string cycle;
          auto start = std::find(path.begin(), path.end(), child);
          for (auto it = start; it != path.end(); ++it) cycle += *it + std::string(kArrow);
          add("CyclicContainment", cycle + child);
        } else if (mark == Mark::fresh) {
          visit(child);
        }
      }
      path.pop_back();
      marks[id] = Mark::done;
    };

    for (const auto& [id, _] : catalog_.images) {
      if (!marks.contains(id)) visit(id);
    }
  }

  const Catalog& catalog_;
  ValidationReport report_;
};

}  // namespace

bool is_valid_id(std::string_view id) {
  return !id.empty() && std::all_of(id.begin(), id.end(), valid_char);
}

bool ValidationReport::contains(std::string_view rendered) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.to_string() == rendered; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& v : violations) out << v.to_string() << '\n';
  return out.str();
}

ValidationReport validate_catalog(const Catalog& catalog) { return Checker(catalog).run(); }

}  // namespace vso
