#pragma once

#include "solace/diagram.hpp"
#include "solace/toolbox.hpp"

namespace solace::sdd {

using namespace din;

// ---------------------------------------------------------------------------
// Translation of labeled solo diagrams (with identifications) into simple
// nets: nodes become communication areas of order n+k+p-2, multiedges become
// triadic prefix cells (input rooted at a codereliction carrying the edge
// label), identification edges become pairs of wires between areas.
//
// Occurrences claim area pairs in (edge id, position) order, targets first
// within an edge; identification edges follow in list order.
// ---------------------------------------------------------------------------

inline SimpleNet translate_diagram(const sd::Diagram& g,
                                   const toolbox::CellFactory& cells = toolbox::canonical_cells()) {
  for (auto& e : g.edges)
    if (e.label.empty()) throw std::runtime_error("translate_diagram needs a labeled diagram");
  if (g.nodes.empty() && g.edges.empty()) return SimpleNet{};  // empty diagram -> epsilon
  Builder b;
  // area per node
  std::map<int, std::vector<int>> area_plugs;  // node id -> plugs (p+1,p-1,p+2,...)
  std::map<int, int> next_pair;                // node id -> next unused pair index
  for (auto& n : g.nodes) {
    int deg = g.degree(n.id);
    auto frag = toolbox::comm_area_with(deg - 2, cells).first;
    for (auto& c : frag.cells) c.tag = "area";
    auto [off, plugs] = b.merge(frag);
    (void)off;
    area_plugs[n.id] = plugs;
    next_pair[n.id] = 0;
  }
  auto claim_pair = [&](int node) {
    int k = next_pair.at(node)++;
    auto& plugs = area_plugs.at(node);
    if (2 * k + 1 >= (int)plugs.size()) throw std::runtime_error("area pair overflow");
    return std::pair<int, int>{plugs[2 * k], plugs[2 * k + 1]};  // (p+, p-)
  };
  // edges in id order
  auto edges = g.edges;
  std::sort(edges.begin(), edges.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (auto& e : edges) {
    auto frag = toolbox::prefix_cell(e.is_input, 3, e.label);
    for (auto& c : frag.cells)
      if (c.tag.empty()) c.tag = "prefix";
    auto [off, plugs] = b.merge(frag);
    (void)off;
    // target: principal to one half, a cap on the other
    auto [tp, tm] = claim_pair(e.target);
    if (e.is_input) {
      b.solder(b.plugport(plugs[0]), b.plugport(tm));  // principal (!o-out) -> p-
      int cap = b.add_cell(CellKind::Weak, "", "cap:" + e.label);
      b.solder_cp(cap, 0, tp);
    } else {
      b.solder(b.plugport(plugs[0]), b.plugport(tp));  // principal (?i-out) -> p+
      int cap = b.add_cell(CellKind::Coweak, "", "cap:" + e.label);
      b.solder_cp(cap, 0, tm);
    }
    // sources: pair i to a pair of the node's area
    for (int i = 0; i < 3; i++) {
      auto [sp, sm] = claim_pair(e.sources[i]);
      b.solder(b.plugport(plugs[1 + 2 * i]), b.plugport(sp));  // d+ -> p+
      b.solder(b.plugport(plugs[2 + 2 * i]), b.plugport(sm));  // d- -> p-
    }
  }
  for (auto& [a, bnode] : g.idents) {
    auto [ap, am] = claim_pair(a);
    auto [bp, bm] = claim_pair(bnode);
    b.solder(b.plugport(ap), b.plugport(bm));
    b.solder(b.plugport(am), b.plugport(bp));
  }
  return b.finalize();
}

// ---------------------------------------------------------------------------
// Quotient key: the canonical form of a net modulo the choice of generalized
// (co)contraction cells. Maximal (co)contraction/(co)weakening trees collapse
// to one vertex each; only their roots and leaf attachments remain visible.
// Equality of quotient keys decides whether two nets are translations of the
// same labeled diagram, which is exactly the freedom the paper's translation
// relation leaves open. Loop counts are ignored (they play no role).
// ---------------------------------------------------------------------------

inline std::string quotient_key(const SimpleNet& s) {
  int nc = (int)s.cells.size();
  auto structural = [&](int c) {
    CellKind k = s.cells[c].kind;
    return k == CellKind::Contr || k == CellKind::Weak || k == CellKind::Cocontr || k == CellKind::Coweak;
  };
  // union trees: child principal wired to a same-family aux slot
  std::vector<int> parent(nc);
  for (int c = 0; c < nc; c++) parent[c] = c;
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  // tree-internal wires: child principal <-> member aux, same family
  auto tree_link = [&](Port a, Port b) {
    if (a.is_free() || b.is_free()) return false;
    if (!structural(a.cell) || !structural(b.cell)) return false;
    if ((a.slot == 0) == (b.slot == 0)) return false;
    return bang_family(s.cells[a.cell].kind) == bang_family(s.cells[b.cell].kind);
  };
  for (auto& [a, b] : s.wires)
    if (tree_link(a, b)) parent[find(a.cell)] = find(b.cell);
  // boundary ports per tree: the root principal plus the leaf aux slots
  struct TreeInfo {
    bool bang = false;
    Port root{-3, 0};
    std::vector<Port> leaf_slots;
  };
  std::map<int, TreeInfo> trees;
  for (int c = 0; c < nc; c++) {
    if (!structural(c)) continue;
    auto& t = trees[find(c)];
    t.bang = bang_family(s.cells[c].kind);
    auto q0 = s.partner({c, 0});
    if (!(q0 && tree_link({c, 0}, *q0) && find(q0->cell) == find(c))) t.root = {c, 0};
    for (int slot = 1; slot <= arity(s.cells[c].kind); slot++) {
      auto q = s.partner({c, slot});
      if (!(q && tree_link({c, slot}, *q) && find(q->cell) == find(c))) t.leaf_slots.push_back({c, slot});
    }
  }
  // arity-1 trees behave exactly like wires: splice them away. Port-level
  // chain walking handles cascades of such trees.
  CanonGraph g;
  std::map<int, int> tree_vertex;
  std::vector<int> cell_vertex(nc, -1);
  for (auto& [rep, t] : trees)
    if (t.leaf_slots.size() != 1) tree_vertex[rep] = g.add_vertex(t.bang ? "T!" : "T?");
  for (int c = 0; c < nc; c++)
    if (!structural(c))
      cell_vertex[c] = g.add_vertex(kind_str(s.cells[c].kind) + (s.cells[c].label.empty() ? "" : "@" + s.cells[c].label));
  std::vector<int> fv;
  for (size_t f = 0; f < s.iface_names.size(); f++)
    fv.push_back(g.add_vertex("F" + std::to_string(f) + ":" + type_str(s.iface_types[f])));
  // endpoint resolution: terminal vertex+tag, or a splice (arity-1 tree)
  struct End {
    bool terminal;
    int vertex;
    int tag;
    Port through;  // for splices: the opposite boundary port
  };
  auto resolve = [&](Port p) -> End {
    if (p.is_free()) return {true, fv[p.slot], 0, {}};
    if (!structural(p.cell)) return {true, cell_vertex[p.cell], port_tag(s.cells[p.cell].kind, p.slot), {}};
    int rep = find(p.cell);
    auto& t = trees.at(rep);
    if (t.leaf_slots.size() == 1) {
      Port other = (p == t.root) ? t.leaf_slots[0] : t.root;
      return {false, 0, 0, other};
    }
    return {true, tree_vertex.at(rep), p == t.root ? 0 : 1, {}};
  };
  std::set<std::pair<Port, Port>> visited;
  auto norm = [](Port a, Port b) { return a < b ? std::make_pair(a, b) : std::make_pair(b, a); };
  for (auto& [w1, w2] : s.wires) {
    if (tree_link(w1, w2) && find(w1.cell) == find(w2.cell)) continue;  // tree-internal
    if (visited.count(norm(w1, w2))) continue;
    // walk both directions through splices; bounded to catch splice cycles
    auto walk = [&](Port start) -> std::optional<std::pair<int, int>> {
      Port cur = start;
      for (size_t steps = 0; steps <= s.wires.size(); steps++) {
        End e = resolve(cur);
        if (e.terminal) return std::make_pair(e.vertex, e.tag);
        Port other = e.through;
        auto q = s.partner(other);
        if (!q) return std::nullopt;
        visited.insert(norm(other, *q));
        cur = *q;
      }
      return std::nullopt;  // pure splice cycle, quotient ignores it
    };
    visited.insert(norm(w1, w2));
    auto ea = walk(w1);
    auto eb = walk(w2);
    if (ea && eb) g.add_edge(ea->first, eb->first, ea->second, eb->second);
  }
  return g.canonical_string();
}

// Two nets translate the same labeled diagram (up to the generalized-cell
// choice) iff their quotient keys agree.
inline bool matches_translation(const sd::Diagram& h, const SimpleNet& u) {
  return quotient_key(translate_diagram(h)) == quotient_key(u);
}

// ---------------------------------------------------------------------------
// Driving a net toward translation shape: multiplicative and tau-tau
// communication steps unroll fired prefixes, bialgebra and non-cap structural
// steps aggregate identification wires. Cap weakenings stay put, so the
// residual areas keep the shape the reduct diagram's translation expects.
// All allowed steps shrink or boundedly cascade, and they are confluent, so a
// greedy pass reaches the unique normal form.
// ---------------------------------------------------------------------------

// Returns nullopt when the net diverges (unbounded bialgebra growth, the
// self-connected-area situation of the cyclic counterexample).
inline std::optional<SimpleNet> drive_to_translation_shape(SimpleNet s,
                                                           const std::set<std::string>& fired_labels = {},
                                                           int max_steps = 0) {
  size_t cell_cap = 4 * s.cells.size() + 64;
  if (max_steps <= 0) max_steps = 60 * (int)s.cells.size() + 400;
  // caps of still-present edges must stay; caps of the fired pair are garbage
  auto cap_blocked = [&](const std::string& tag) {
    if (tag.rfind("cap:", 0) != 0) return false;
    return fired_labels.count(tag.substr(4)) == 0;
  };
  for (int step = 0; step < max_steps; step++) {
    bool fired = false;
    for (auto& r : find_redexes(s)) {
      bool allowed = false;
      switch (r.cls) {
        case RuleClass::Multiplicative:
          allowed = true;
          break;
        case RuleClass::Communication:
          allowed = s.cells[r.cell_a].label.empty() && s.cells[r.cell_b].label.empty();
          break;
        case RuleClass::Structural:
          allowed = !cap_blocked(s.cells[r.cell_a].tag) && !cap_blocked(s.cells[r.cell_b].tag);
          break;
        case RuleClass::NonDeterministic:
          allowed = false;
          break;
      }
      if (!allowed) continue;
      Net out = apply_rule(s, r);
      assert(out.summands.size() == 1);
      s = std::move(out.summands[0]);
      fired = true;
      break;
    }
    if (!fired) return s;
    if (s.cells.size() > cell_cap) return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Bisimulation squares
// ---------------------------------------------------------------------------

inline int default_depth(const SimpleNet& s) {
  if (const char* env = getenv("SOLACE_DEPTH")) return std::max(1, atoi(env));
  return 4 * (int)s.cells.size() + 8;
}

struct SquareResult {
  bool ok = false;
  bool exhausted = false;
  std::string detail;
};

// Forward square: g --(l,m)--> h in S_L^ac; the translated net must have an
// (l,m) transition whose reduct drives to a translation of h.
inline SquareResult check_square_forward(const sd::Diagram& g, const std::string& l, const std::string& m,
                                         const sd::Diagram& h, int depth = 0) {
  SquareResult res;
  SimpleNet s = translate_diagram(g);
  if (depth <= 0) depth = default_depth(s);
  auto lts = din_lts_transition(s, l, m, depth);
  res.exhausted = lts.exhausted;
  if (lts.reducts.empty()) {
    res.detail = "no (l,m) transition on the net side";
    return res;
  }
  std::string target = quotient_key(translate_diagram(h));
  for (auto& t0 : lts.reducts) {
    auto u = drive_to_translation_shape(t0, {l, m});
    if (!u) {
      res.detail = "net side diverges (self-connected communication area)";
      continue;
    }
    if (quotient_key(*u) == target) {
      res.ok = true;
      return res;
    }
  }
  if (res.detail.empty()) res.detail = "no net reduct drives to the diagram reduct's translation";
  return res;
}

// Backward square: every bounded (l,m) transition of translate(g) must be
// matched by firing the l/m-labeled dual pair of g.
inline SquareResult check_square_backward(const sd::Diagram& g, const std::string& l, const std::string& m,
                                          int depth = 0) {
  SquareResult res;
  SimpleNet s = translate_diagram(g);
  if (depth <= 0) depth = default_depth(s);
  auto lts = din_lts_transition(s, l, m, depth);
  res.exhausted = lts.exhausted;
  const sd::MultiEdge *el = nullptr, *em = nullptr;
  for (auto& e : g.edges) {
    if (e.label == l) el = &e;
    if (e.label == m) em = &e;
  }
  bool dual = el && em && el->is_input && !em->is_input && el->target == em->target;
  if (!dual) {
    if (lts.reducts.empty()) {
      res.ok = true;  // nothing to match
    } else {
      res.detail = "net transition with no dual pair on the diagram side";
    }
    return res;
  }
  auto red = sd::reduce_diagram(g, el->id, em->id);
  if (std::holds_alternative<sd::ReduceFailure>(red)) {
    res.detail = "diagram-side reduction stuck";
    res.ok = lts.reducts.empty();
    return res;
  }
  if (lts.reducts.empty()) {
    res.detail = "diagram transition not found on the net side";
    return res;
  }
  std::string target = quotient_key(translate_diagram(std::get<sd::Diagram>(red)));
  for (auto& t0 : lts.reducts) {
    auto u = drive_to_translation_shape(t0, {l, m});
    if (!u || quotient_key(*u) != target) {
      res.detail = !u ? "net side diverges (self-connected communication area)"
                      : "a net reduct does not match the diagram reduct";
      return res;
    }
  }
  res.ok = true;
  return res;
}

// Contraction of one identification edge against aggregation of the two
// areas (the mismatch lemma). Preconditions: distinct endpoints, at least one
// bound.
enum class IdentCheck { Holds, Fails, Rejected };

inline IdentCheck check_ident_contraction(const sd::Diagram& g, size_t ident_index, int max_steps = 0) {
  if (ident_index >= g.idents.size()) return IdentCheck::Rejected;
  auto [a, b] = g.idents[ident_index];
  if (a == b) return IdentCheck::Rejected;
  const sd::DiagNode* na = g.node(a);
  const sd::DiagNode* nb = g.node(b);
  if (!na || !nb || (!na->bound && !nb->bound)) return IdentCheck::Rejected;
  // diagram side: contract just this edge
  sd::Diagram h = g;
  h.idents.erase(h.idents.begin() + ident_index);
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
  for (auto& e : h.edges) {
    if (e.target == drop) e.target = keep;
    for (auto& snode : e.sources)
      if (snode == drop) snode = keep;
  }
  for (auto& [x, y] : h.idents) {
    if (x == drop) x = keep;
    if (y == drop) y = keep;
  }
  h.nodes.erase(std::remove_if(h.nodes.begin(), h.nodes.end(),
                               [&](const sd::DiagNode& n) { return n.id == drop; }),
                h.nodes.end());
  // net side: aggregate by driving; the remaining identification wires stay
  // pending on both sides, so the quotient keys must agree
  SimpleNet s = translate_diagram(g);
  auto u = drive_to_translation_shape(s, {}, max_steps);
  auto target = drive_to_translation_shape(translate_diagram(h), {}, max_steps);
  if (!u || !target) return IdentCheck::Fails;
  return quotient_key(*u) == quotient_key(*target) ? IdentCheck::Holds : IdentCheck::Fails;
}

// ---------------------------------------------------------------------------
// Full square harness over one diagram
// ---------------------------------------------------------------------------

struct HarnessRow {
  std::string input_label, output_label;
  bool diagram_side = false;
  bool net_side = false;
  bool forward_ok = false;
  bool backward_ok = false;
  bool exhausted = false;
};

struct HarnessReport {
  bool ac_member = false;
  bool budget_exceeded = false;
  bool ok = false;  // everything matched
  std::vector<HarnessRow> rows;
};

inline HarnessReport bisim_harness(const sd::Diagram& g, int depth = 0, size_t ac_budget = 100000) {
  HarnessReport rep;
  auto ac = sd::is_ac_member(g, ac_budget);
  rep.budget_exceeded = ac.kind == sd::AcResult::BudgetExceeded;
  rep.ac_member = ac.kind == sd::AcResult::Member;
  SimpleNet s = translate_diagram(g);
  if (depth <= 0) depth = default_depth(s);
  // diagram-side transitions
  std::map<std::pair<std::string, std::string>, sd::Diagram> strans;
  for (auto& t : sd::lts_transitions(g)) strans.emplace(std::make_pair(t.input_label, t.output_label), t.target);
  // candidate label pairs: input-edge label x output-edge label
  std::vector<std::string> in_labels, out_labels;
  for (auto& e : g.edges) (e.is_input ? in_labels : out_labels).push_back(e.label);
  bool all_ok = true;
  for (auto& l : in_labels) {
    for (auto& m : out_labels) {
      auto lts = din_lts_transition(s, l, m, depth);
      bool dside = strans.count({l, m}) > 0;
      bool nside = !lts.reducts.empty();
      if (!dside && !nside && !lts.exhausted) continue;
      HarnessRow row;
      row.input_label = l;
      row.output_label = m;
      row.diagram_side = dside;
      row.net_side = nside;
      row.exhausted = lts.exhausted;
      if (dside) {
        auto fwd = check_square_forward(g, l, m, strans.at({l, m}), depth);
        row.forward_ok = fwd.ok;
        row.exhausted = row.exhausted || fwd.exhausted;
      }
      auto bwd = check_square_backward(g, l, m, depth);
      row.backward_ok = bwd.ok;
      row.exhausted = row.exhausted || bwd.exhausted;
      all_ok = all_ok && (dside == nside) && (!dside || row.forward_ok) && row.backward_ok && !row.exhausted;
      rep.rows.push_back(row);
    }
  }
  rep.ok = rep.ac_member && all_ok;
  return rep;
}

inline std::string harness_table(const HarnessReport& rep) {
  std::ostringstream os;
  os << "ac-member: " << (rep.ac_member ? "yes" : (rep.budget_exceeded ? "budget-exceeded" : "no")) << "\n";
  os << "label-pair  S_L  D_L  forward  backward  budget\n";
  for (auto& r : rep.rows) {
    os << "(" << r.input_label << "," << r.output_label << ")  " << (r.diagram_side ? "yes" : "no ") << "  "
       << (r.net_side ? "yes" : "no ") << "  " << (r.diagram_side ? (r.forward_ok ? "ok" : "FAIL") : "-")
       << "  " << (r.backward_ok ? "ok" : "FAIL") << "  " << (r.exhausted ? "EXHAUSTED" : "-") << "\n";
  }
  os << (rep.ok ? "bisimulation squares: all matched\n" : "bisimulation squares: MISMATCH\n");
  return os.str();
}

}  // namespace solace::sdd
