#pragma once

#include <variant>

#include "solace/solos.hpp"

namespace solace::sd {

// Triadic solo diagrams: nodes tagged free/bound, labeled ternary multiedges,
// optional identification edges (during reduction).

struct DiagNode {
  int id;
  bool bound;
  Name display;  // optional
};

struct MultiEdge {
  int id;
  bool is_input;
  std::array<int, 3> sources;
  int target;
  std::string label;  // empty = unlabeled
};

struct Diagram {
  std::vector<DiagNode> nodes;
  std::vector<MultiEdge> edges;
  std::vector<std::pair<int, int>> idents;  // unordered pairs

  const DiagNode* node(int id) const {
    for (auto& n : nodes)
      if (n.id == id) return &n;
    return nullptr;
  }
  bool labeled() const {
    for (auto& e : edges)
      if (e.label.empty()) return false;
    return !edges.empty();
  }
  int degree(int node_id) const {
    int d = 0;
    for (auto& e : edges) {
      if (e.target == node_id) d++;
      for (int s : e.sources)
        if (s == node_id) d++;
    }
    for (auto& [a, b] : idents) {
      if (a == node_id) d++;
      if (b == node_id) d++;
    }
    return d;
  }
};

inline std::string validate(const Diagram& g) {
  std::set<int> ids;
  for (auto& n : g.nodes)
    if (!ids.insert(n.id).second) return "duplicate node id " + std::to_string(n.id);
  auto known = [&](int id) { return ids.count(id) > 0; };
  std::set<std::string> labels;
  std::set<int> eids;
  std::set<int> touched;
  for (auto& e : g.edges) {
    if (!eids.insert(e.id).second) return "duplicate edge id";
    if (!known(e.target)) return "edge target unknown";
    touched.insert(e.target);
    for (int s : e.sources) {
      if (!known(s)) return "edge source unknown";
      touched.insert(s);
    }
    if (!e.label.empty() && !labels.insert(e.label).second) return "duplicate label " + e.label;
  }
  for (auto& [a, b] : g.idents) {
    if (!known(a) || !known(b)) return "identification endpoint unknown";
    touched.insert(a);
    touched.insert(b);
  }
  for (auto& n : g.nodes)
    if (!touched.count(n.id)) return "isolated node " + std::to_string(n.id) + " (" + n.display + ")";
  return "";
}

// --- term <-> diagram ----------------------------------------------------------

// Nodes per name (bound under nu -> bound node), one multiedge per solo.
// Labels come from the term's solos when present, else stay empty; pass
// auto_label to assign l1..ln in flat order.
inline Diagram term_to_diagram(const solos::TermP& t, bool auto_label = false) {
  solos::Flat f = solos::flatten(t);
  Diagram g;
  std::map<Name, int> node_of;
  auto node_for = [&](const Name& n) {
    auto it = node_of.find(n);
    if (it != node_of.end()) return it->second;
    int id = (int)g.nodes.size();
    g.nodes.push_back({id, f.is_bound(n), n});
    node_of[n] = id;
    return id;
  };
  int next_label = 1;
  for (auto& s : f.solos) {
    MultiEdge e;
    e.id = (int)g.edges.size();
    e.is_input = s.is_input;
    e.target = node_for(s.subject);
    for (int i = 0; i < 3; i++) e.sources[i] = node_for(s.objects[i]);
    e.label = s.label;
    if (auto_label && e.label.empty()) e.label = "l" + std::to_string(next_label++);
    g.edges.push_back(e);
  }
  return g;
}

// --- isomorphism -----------------------------------------------------------------

inline CanonGraph iso_graph(const Diagram& g, bool use_labels) {
  CanonGraph cg;
  std::map<int, int> nv;
  for (auto& n : g.nodes) nv[n.id] = cg.add_vertex(n.bound ? "nB" : "nF");
  for (auto& e : g.edges) {
    std::string color = e.is_input ? "in" : "out";
    if (use_labels && !e.label.empty()) color += "@" + e.label;
    int v = cg.add_vertex(color);
    cg.add_edge(v, nv[e.target], 0, 100);
    for (int i = 0; i < 3; i++) cg.add_edge(v, nv[e.sources[i]], i + 1, 100);
  }
  for (auto& [a, b] : g.idents) cg.add_edge(nv[a], nv[b], 50, 50);
  return cg;
}

inline std::string canonical_key(const Diagram& g, bool use_labels = true) {
  return iso_graph(g, use_labels).canonical_string();
}

struct IsoWitness {
  std::map<int, int> node_map;  // a-node id -> b-node id
};

// Isomorphism respecting binding tags, polarity, source order, target, and
// labels when both diagrams are labeled.
inline std::optional<IsoWitness> diagram_iso(const Diagram& a, const Diagram& b) {
  bool use_labels = a.labeled() && b.labeled();
  CanonGraph ca = iso_graph(a, use_labels), cb = iso_graph(b, use_labels);
  if (ca.canonical_string() != cb.canonical_string()) return std::nullopt;
  auto oa = ca.canonical_order(), ob = cb.canonical_order();
  IsoWitness w;
  // vertices 0..|nodes|-1 are nodes in both graphs
  std::map<int, int> rank_a;  // vertex -> rank
  for (size_t r = 0; r < oa.size(); r++) rank_a[oa[r]] = (int)r;
  for (size_t i = 0; i < a.nodes.size(); i++) {
    int rank = rank_a[(int)i];
    int bv = ob[rank];
    w.node_map[a.nodes[i].id] = b.nodes[bv].id;
  }
  return w;
}

// --- reduction -------------------------------------------------------------------

struct DualPair {
  int input_edge;   // edge id
  int output_edge;  // edge id
  bool acyclic;     // identification subgraph of (R2) is acyclic
  bool freeness_ok;  // contraction never forced to merge two free nodes
};

inline const MultiEdge* edge_by_id(const Diagram& g, int id) {
  for (auto& e : g.edges)
    if (e.id == id) return &e;
  return nullptr;
}

// The three identification edges a pair would introduce.
inline std::vector<std::pair<int, int>> pair_idents(const MultiEdge& in, const MultiEdge& out) {
  std::vector<std::pair<int, int>> v;
  for (int i = 0; i < 3; i++) v.push_back({in.sources[i], out.sources[i]});
  return v;
}

// A multigraph edge set is contractible to no-identifications iff each
// connected component holds at most one free node; it is acyclic iff no cycle
// (counting parallel edges and self-loops as cycles).
inline void analyze_idents(const Diagram& g, const std::vector<std::pair<int, int>>& idents, bool& acyclic,
                           bool& freeness_ok) {
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) -> int {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    if (it->second == x) return x;
    return parent[x] = find(it->second);
  };
  acyclic = true;
  for (auto& [a, b] : idents) {
    int ra = find(a), rb = find(b);
    if (ra == rb)
      acyclic = false;  // self-loop or closed cycle
    else
      parent[ra] = rb;
  }
  freeness_ok = true;
  std::map<int, std::set<int>> comp_frees;
  for (auto& [a, b] : idents) {
    for (int x : {a, b}) {
      const DiagNode* n = g.node(x);
      if (n && !n->bound) comp_frees[find(x)].insert(x);
    }
  }
  for (auto& [root, fs] : comp_frees)
    if (fs.size() >= 2) freeness_ok = false;
}

// All dual pairs (equal target, opposite polarity) with their (R2) analysis.
inline std::vector<DualPair> find_dual_pairs(const Diagram& g) {
  std::vector<DualPair> out;
  for (auto& e1 : g.edges) {
    for (auto& e2 : g.edges) {
      if (!e1.is_input || e2.is_input) continue;
      if (e1.target != e2.target) continue;
      DualPair p{e1.id, e2.id, true, true};
      analyze_idents(g, pair_idents(e1, e2), p.acyclic, p.freeness_ok);
      out.push_back(p);
    }
  }
  return out;
}

struct ReduceFailure {
  std::pair<int, int> stuck_edge;  // two distinct free nodes
};

struct ReduceTrace {
  Diagram after_r2;                 // identification edges added, e1/e2 erased
  std::vector<Diagram> r3_stages;   // after each contraction
};

// (R1) erase the dual pair, (R2) add the three identification edges, then
// (R3) contract identification edges in deterministic order. Merging two
// distinct nodes needs a bound endpoint (free + bound -> free); an edge from a
// node to itself is simply dropped. Fails iff an edge joins two free nodes.
inline std::variant<Diagram, ReduceFailure> reduce_diagram(const Diagram& g, int input_edge, int output_edge,
                                                           ReduceTrace* trace = nullptr) {
  const MultiEdge* e1 = edge_by_id(g, input_edge);
  const MultiEdge* e2 = edge_by_id(g, output_edge);
  assert(e1 && e2 && e1->is_input && !e2->is_input && e1->target == e2->target);
  Diagram h;
  h.nodes = g.nodes;
  for (auto& e : g.edges)
    if (e.id != input_edge && e.id != output_edge) h.edges.push_back(e);
  h.idents = g.idents;
  for (auto& p : pair_idents(*e1, *e2)) h.idents.push_back(p);
  if (trace) trace->after_r2 = h;

  auto remap = [&](Diagram& d, int from, int to) {
    for (auto& e : d.edges) {
      if (e.target == from) e.target = to;
      for (auto& s : e.sources)
        if (s == from) s = to;
    }
    for (auto& [a, b] : d.idents) {
      if (a == from) a = to;
      if (b == from) b = to;
    }
    d.nodes.erase(std::remove_if(d.nodes.begin(), d.nodes.end(), [&](const DiagNode& n) { return n.id == from; }),
                  d.nodes.end());
  };

  while (!h.idents.empty()) {
    // deterministic order: smallest normalized pair first
    size_t best = 0;
    auto norm = [](std::pair<int, int> p) {
      if (p.first > p.second) std::swap(p.first, p.second);
      return p;
    };
    for (size_t i = 1; i < h.idents.size(); i++)
      if (norm(h.idents[i]) < norm(h.idents[best])) best = i;
    // prefer a contractible edge if the smallest is blocked
    auto contractible = [&](const std::pair<int, int>& p) {
      if (p.first == p.second) return true;
      return h.node(p.first)->bound || h.node(p.second)->bound;
    };
    if (!contractible(h.idents[best])) {
      bool found = false;
      for (size_t i = 0; i < h.idents.size(); i++)
        if (contractible(h.idents[i])) {
          best = i;
          found = true;
          break;
        }
      if (!found) return ReduceFailure{norm(h.idents[best])};
    }
    auto [a, b] = h.idents[best];
    h.idents.erase(h.idents.begin() + best);
    if (a == b) {
      // identifying a node with itself: nothing to do
    } else {
      const DiagNode* na = h.node(a);
      const DiagNode* nb = h.node(b);
      int keep, drop;
      if (!na->bound) {
        keep = a;
        drop = b;
      } else if (!nb->bound) {
        keep = b;
        drop = a;
      } else {
        keep = std::min(a, b);
        drop = std::max(a, b);
      }
      remap(h, drop, keep);
    }
    if (trace) trace->r3_stages.push_back(h);
  }
  // drop isolated nodes
  std::set<int> touched;
  for (auto& e : h.edges) {
    touched.insert(e.target);
    for (int s : e.sources) touched.insert(s);
  }
  h.nodes.erase(
      std::remove_if(h.nodes.begin(), h.nodes.end(), [&](const DiagNode& n) { return !touched.count(n.id); }),
      h.nodes.end());
  return h;
}

// --- labeled transition system S_L ------------------------------------------------

struct Transition {
  std::string input_label, output_label;
  Diagram target;
};

inline std::vector<Transition> lts_transitions(const Diagram& g) {
  std::vector<Transition> out;
  for (auto& p : find_dual_pairs(g)) {
    auto r = reduce_diagram(g, p.input_edge, p.output_edge);
    if (std::holds_alternative<Diagram>(r)) {
      out.push_back({edge_by_id(g, p.input_edge)->label, edge_by_id(g, p.output_edge)->label,
                     std::get<Diagram>(r)});
    }
  }
  return out;
}

// --- S_L^ac membership --------------------------------------------------------------

struct AcWitnessStep {
  std::string input_label, output_label;
};

struct AcResult {
  enum Kind { Member, NonMember, BudgetExceeded } kind;
  std::vector<AcWitnessStep> path;      // NonMember: transitions to the bad diagram
  std::string offending;                // description of the offending pair
};

// Exhaustive search over S_L reachability; Member iff every reachable diagram
// has only acyclic redexes among its dual pairs.
inline AcResult is_ac_member(const Diagram& g, size_t budget = 100000) {
  struct State {
    Diagram d;
    std::vector<AcWitnessStep> path;
  };
  std::vector<State> frontier{{g, {}}};
  std::set<std::string> seen{canonical_key(g)};
  size_t visited = 0;
  while (!frontier.empty()) {
    std::vector<State> next;
    for (auto& st : frontier) {
      if (++visited > budget) return {AcResult::BudgetExceeded, {}, ""};
      for (auto& p : find_dual_pairs(st.d)) {
        if (!p.acyclic || !p.freeness_ok) {
          std::string why = "pair (input " + edge_by_id(st.d, p.input_edge)->label + ", output " +
                            edge_by_id(st.d, p.output_edge)->label + ")" +
                            (p.acyclic ? "" : " has a cyclic identification step") +
                            (p.freeness_ok ? "" : " identifies two free nodes");
          return {AcResult::NonMember, st.path, why};
        }
      }
      for (auto& tr : lts_transitions(st.d)) {
        auto key = canonical_key(tr.target);
        if (!seen.insert(key).second) continue;
        State ns{tr.target, st.path};
        ns.path.push_back({tr.input_label, tr.output_label});
        next.push_back(std::move(ns));
      }
    }
    frontier = std::move(next);
  }
  return {AcResult::Member, {}, ""};
}

// --- text format & DOT ---------------------------------------------------------------

inline std::string to_text(const Diagram& g) {
  std::ostringstream os;
  for (auto& n : g.nodes) {
    os << "node n" << n.id << (n.bound ? " bound" : " free");
    if (!n.display.empty()) os << " " << n.display;
    os << "\n";
  }
  for (auto& e : g.edges) {
    os << "edge e" << e.id << (e.is_input ? " in" : " out") << " n" << e.target;
    for (int s : e.sources) os << " n" << s;
    if (!e.label.empty()) os << " @" << e.label;
    os << "\n";
  }
  for (auto& [a, b] : g.idents) os << "ident n" << a << " n" << b << "\n";
  return os.str();
}

inline Diagram from_text(const std::string& text) {
  Diagram g;
  std::istringstream is(text);
  std::string line;
  auto node_id = [&](const std::string& tok) -> int {
    if (tok.size() < 2 || tok[0] != 'n') throw parse_error("bad node ref: " + tok);
    return std::stoi(tok.substr(1));
  };
  while (std::getline(is, line)) {
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "node") {
      if (toks.size() < 3) throw parse_error("bad node line: " + line);
      DiagNode n{node_id(toks[1]), toks[2] == "bound", toks.size() > 3 ? toks[3] : ""};
      if (toks[2] != "bound" && toks[2] != "free") throw parse_error("bad node tag: " + line);
      g.nodes.push_back(n);
    } else if (toks[0] == "edge") {
      if (toks.size() < 7) throw parse_error("bad edge line: " + line);
      MultiEdge e;
      if (toks[1].size() < 2 || toks[1][0] != 'e') throw parse_error("bad edge id: " + line);
      e.id = std::stoi(toks[1].substr(1));
      e.is_input = toks[2] == "in";
      if (toks[2] != "in" && toks[2] != "out") throw parse_error("bad polarity: " + line);
      e.target = node_id(toks[3]);
      for (int i = 0; i < 3; i++) e.sources[i] = node_id(toks[4 + i]);
      if (toks.size() > 7 && toks[7][0] == '@') e.label = toks[7].substr(1);
      g.edges.push_back(e);
    } else if (toks[0] == "ident") {
      if (toks.size() != 3) throw parse_error("bad ident line: " + line);
      g.idents.push_back({node_id(toks[1]), node_id(toks[2])});
    } else {
      throw parse_error("unknown diagram directive: " + toks[0]);
    }
  }
  auto err = validate(g);
  if (!err.empty()) throw parse_error("invalid diagram: " + err);
  return g;
}

// Drawing conventions of the paper: free nodes white, bound black, input
// edges arrive at their target, output edges leave it, identifications dashed.
inline std::string to_dot(const Diagram& g) {
  std::ostringstream os;
  os << "graph solo_diagram {\n  node [shape=circle];\n";
  for (auto& n : g.nodes) {
    os << "  n" << n.id << " [label=\"" << (n.display.empty() ? std::to_string(n.id) : n.display) << "\""
       << (n.bound ? ", style=filled, fillcolor=black, fontcolor=white" : ", style=filled, fillcolor=white")
       << "];\n";
  }
  for (auto& e : g.edges) {
    std::string box = "e" + std::to_string(e.id);
    os << "  " << box << " [shape=box, label=\"" << (e.is_input ? "in" : "out");
    if (!e.label.empty()) os << " " << e.label;
    os << "\"];\n";
    os << "  " << box << " -- n" << e.target << " [dir=" << (e.is_input ? "forward" : "back")
       << ", penwidth=2];\n";
    for (int i = 0; i < 3; i++)
      os << "  " << box << " -- n" << e.sources[i] << " [label=\"" << (i + 1) << "\"];\n";
  }
  for (auto& [a, b] : g.idents) os << "  n" << a << " -- n" << b << " [style=dashed];\n";
  os << "}\n";
  return os.str();
}

// Oriented identification-edge analysis for the "node without incoming edge"
// lemma: orient each (R2) edge toward the R-occurrence endpoint and check the
// per-component root/in-degree structure.
struct OrientedIdentCheck {
  bool has_root_per_component = true;
  bool indegree_le_one = true;
  bool acyclic = true;
};

inline OrientedIdentCheck check_oriented_idents(const std::vector<std::pair<int, int>>& oriented_edges) {
  // edges are (from, to) pairs on node ids
  OrientedIdentCheck res;
  std::map<int, int> indeg;
  std::set<int> nodes;
  for (auto& [a, b] : oriented_edges) {
    indeg[b]++;
    nodes.insert(a);
    nodes.insert(b);
    if (a == b) res.acyclic = false;
  }
  for (auto& [n, d] : indeg)
    if (d > 1) res.indegree_le_one = false;
  // components via union-find
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) -> int {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    if (it->second == x) return x;
    return parent[x] = find(it->second);
  };
  for (auto& [a, b] : oriented_edges) {
    int ra = find(a), rb = find(b);
    if (ra != rb) parent[ra] = rb;
  }
  std::map<int, bool> has_root;
  for (int n : nodes) has_root[find(n)] = has_root[find(n)] || indeg[n] == 0;
  for (auto& [c, r] : has_root)
    if (!r) res.has_root_per_component = false;
  // acyclicity: component edge count <= vertex count - 1
  std::map<int, int> ecount, vcount;
  for (int n : nodes) vcount[find(n)]++;
  for (auto& [a, b] : oriented_edges) ecount[find(a)]++;
  for (auto& [c, e] : ecount)
    if (e > vcount[c] - 1) res.acyclic = false;
  return res;
}

}  // namespace solace::sd
