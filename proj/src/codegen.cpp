#include "vso/codegen.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>

#include "vso/error.hpp"

namespace vso {

namespace {

auto tie_break_key(const Occurrence& o) {
  return std::tie(o.instance, o.method, o.position, o.slot);
}

std::string describe_cycle(const PackageDag& dag) {
  std::vector<std::vector<std::size_t>> adj(dag.nodes.size());
  for (auto [a, b] : dag.edges) adj[a].push_back(b);

  enum class Mark { fresh, active, done };
  std::vector<Mark> marks(dag.nodes.size(), Mark::fresh);
  std::vector<std::size_t> path;
  std::string found;

  std::function<bool(std::size_t)> visit = [&](std::size_t n) {
    marks[n] = Mark::active;
    path.push_back(n);
    for (std::size_t next : adj[n]) {
      if (marks[next] == Mark::active) {
        auto start = std::find(path.begin(), path.end(), next);
        for (auto it = start; it != path.end(); ++it) {
          found += dag.nodes[*it].label(Level::ip) + " -> ";
        }
        found += dag.nodes[next].label(Level::ip);
        return true;
      }
      if (marks[next] == Mark::fresh && visit(next)) return true;
    }
    path.pop_back();
    marks[n] = Mark::done;
    return false;
  };
  for (std::size_t n = 0; n < dag.nodes.size(); ++n) {
    if (marks[n] == Mark::fresh && visit(n)) break;
  }
  return found;
}

// Expands {name} placeholders through `resolve`; "{{" and "}}" are escapes.
template <class Resolve>
std::string render(std::string_view tmpl, Resolve&& resolve, const std::string& subject) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
      out += '{';
      ++i;
    } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
      out += '}';
      ++i;
    } else if (c == '{') {
      const auto close = tmpl.find('}', i);
      if (close == std::string_view::npos) {
        throw Error(ErrorCode::unresolved_placeholder,
                    "UnresolvedPlaceholder: unterminated '{' in template for " + subject, subject);
      }
      const std::string name(tmpl.substr(i + 1, close - i - 1));
      std::optional<std::string> value = resolve(name);
      if (!value) {
        throw Error(ErrorCode::unresolved_placeholder,
                    "UnresolvedPlaceholder: {" + name + "} in template for " + subject, subject);
      }
      out += *value;
      i = close;
    } else {
      out += c;
    }
  }
  return out;
}

std::string reference(const DslVocabulary& vocab, const std::string& step,
                      const std::string& output) {
  return render(
      vocab.ref_syntax,
      [&](const std::string& name) -> std::optional<std::string> {
        if (name == "step") return step;
        if (name == "out") return output;
        return std::nullopt;
      },
      "ref_syntax of vocabulary " + vocab.name);
}

void append_block(std::string& out, std::string_view block, bool trim) {
  std::size_t start = 0;
  while (start <= block.size()) {
    auto end = block.find('\n', start);
    if (end == std::string_view::npos) end = block.size();
    std::string_view line = block.substr(start, end - start);
    if (trim) {
      while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
        line.remove_suffix(1);
      }
    }
    if (end == block.size() && line.empty() && start != 0) break;  // block ended with '\n'
    out.append(line);
    out += '\n';
    start = end + 1;
  }
}

}  // namespace

std::size_t PackageDag::index_of(const Endpoint& e) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), e, [](const Occurrence& o, const Endpoint& x) {
    return std::tie(o.instance, o.slot, o.method, o.position) <
           std::tie(x.instance, x.address.scope, x.address.method, x.address.position);
  });
  if (it == nodes.end() || it->instance != e.instance || it->slot != e.address.scope ||
      it->method != e.address.method || it->position != e.address.position) {
    return nodes.size();
  }
  return static_cast<std::size_t>(it - nodes.begin());
}

PackageDag build_package_dag(const Environment& env, const Catalog& catalog,
                             const Configuration& config, DagOptions options) {
  PackageDag dag;
  dag.nodes = occurrences(env, catalog, config);
  dag.feeds = ip_links(env, catalog, config);

  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::set<Endpoint> fed;
  for (const auto& link : dag.feeds) {
    edges.emplace(dag.index_of(link.source), dag.index_of(link.target));
    fed.insert(link.target);
  }
  dag.edges.assign(edges.begin(), edges.end());

  if (topological_order(dag).size() != dag.nodes.size()) {
    const std::string cycle = describe_cycle(dag);
    throw Error(ErrorCode::cycle_detected, "CycleDetected: " + cycle, cycle);
  }

  if (options.require_inputs_fed) {
    for (const auto& node : dag.nodes) {
      const auto& ip = catalog.implementing_package(node.package);
      for (const auto& in : ip.inputs) {
        Endpoint e{node.instance, ParamAddress{node.slot, node.method, node.position, in.varname}};
        if (!catalog.effective_value(ip, in) && !fed.contains(e)) {
          throw Error(ErrorCode::disconnected_required_input,
                      "DisconnectedRequiredInput: " + to_string(e), to_string(e));
        }
      }
    }
  }
  return dag;
}

std::vector<std::size_t> topological_order(const PackageDag& dag) {
  const std::size_t n = dag.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<std::size_t> indegree(n, 0);
  for (auto [a, b] : dag.edges) {
    adj[a].push_back(b);
    ++indegree[b];
  }
  auto before = [&](std::size_t a, std::size_t b) {
    return std::tuple_cat(tie_break_key(dag.nodes[a]), std::tie(a)) <
           std::tuple_cat(tie_break_key(dag.nodes[b]), std::tie(b));
  };
  std::set<std::size_t, decltype(before)> ready(before);
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  while (!ready.empty()) {
    const std::size_t next = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(next);
    for (std::size_t succ : adj[next]) {
      if (--indegree[succ] == 0) ready.insert(succ);
    }
  }
  return order;  // shorter than n iff there is a cycle
}

DslVocabulary generic_vocabulary(const Catalog& catalog) {
  DslVocabulary vocab;
  vocab.name = "generic";
  vocab.header = "# workflow script (generic vocabulary)";
  for (const auto& [id, sp] : catalog.software_packages) {
    auto inputs = sp.inputs;
    std::sort(inputs.begin(), inputs.end(),
              [](const auto& a, const auto& b) { return a.varname < b.varname; });
    std::string tmpl = "{step} = " + id + "(";
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (i) tmpl += ", ";
      tmpl += inputs[i].varname + "={in:" + inputs[i].varname + "}";
    }
    tmpl += ")";
    vocab.templates.emplace(id, std::move(tmpl));
  }
  return vocab;
}

std::vector<TraversalRow> explain_traversal(const Environment& env, const Catalog& catalog,
                                            const Configuration& config) {
  const PackageDag dag = build_package_dag(env, catalog, config);
  const auto order = topological_order(dag);

  std::vector<std::string> step_of(dag.nodes.size());
  for (std::size_t k = 0; k < order.size(); ++k) step_of[order[k]] = "step_" + std::to_string(k + 1);

  std::map<Endpoint, const Link*> feed_into;
  for (const auto& link : dag.feeds) feed_into.emplace(link.target, &link);

  std::vector<TraversalRow> rows;
  rows.reserve(order.size());
  for (std::size_t node : order) {
    const Occurrence& occ = dag.nodes[node];
    const auto& ip = catalog.implementing_package(occ.package);
    TraversalRow row{step_of[node], occ, ip.software_package, {}, {}};
    for (const auto& in : ip.inputs) {
      Binding b{in.varname, std::nullopt, {}, {}};
      Endpoint e{occ.instance, ParamAddress{occ.slot, occ.method, occ.position, in.varname}};
      if (auto it = feed_into.find(e); it != feed_into.end()) {
        b.source_step = step_of[dag.index_of(it->second->source)];
        b.source_output = it->second->source.address.name;
      } else {
        b.literal = catalog.effective_value(ip, in);
      }
      row.inputs.push_back(std::move(b));
    }
    for (const auto& out : ip.outputs) row.outputs.push_back(out.varname);
    std::sort(row.inputs.begin(), row.inputs.end(),
              [](const Binding& a, const Binding& b) { return a.varname < b.varname; });
    std::sort(row.outputs.begin(), row.outputs.end());
    rows.push_back(std::move(row));
  }
  return rows;
}

WorkflowScript generate_script(const Environment& env, const Catalog& catalog,
                               const Configuration& config, const DslVocabulary& vocab) {
  const auto rows = explain_traversal(env, catalog, config);

  WorkflowScript script;
  if (vocab.header) append_block(script.text, *vocab.header, false);
  for (const auto& row : rows) {
    auto tmpl = vocab.templates.find(row.software_package);
    if (tmpl == vocab.templates.end()) {
      throw Error(ErrorCode::missing_template,
                  "MissingTemplate: vocabulary '" + vocab.name + "' has no template for " +
                      row.software_package,
                  row.software_package);
    }
    const std::string statement = render(
        tmpl->second,
        [&](const std::string& name) -> std::optional<std::string> {
          if (name == "step") return row.step;
          if (name.starts_with("in:")) {
            const auto var = name.substr(3);
            for (const auto& b : row.inputs) {
              if (b.varname != var) continue;
              if (b.fed()) return reference(vocab, b.source_step, b.source_output);
              return b.literal.value_or("");
            }
            return std::nullopt;
          }
          if (name.starts_with("out:")) {
            const auto var = name.substr(4);
            if (std::find(row.outputs.begin(), row.outputs.end(), var) == row.outputs.end()) {
              return std::nullopt;
            }
            return reference(vocab, row.step, var);
          }
          return std::nullopt;
        },
        row.software_package);
    append_block(script.text, statement, true);
    script.step_index.emplace(row.step, row.occurrence);
  }
  if (vocab.footer) append_block(script.text, *vocab.footer, false);
  return script;
}

}  // namespace vso
