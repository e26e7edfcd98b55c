// Acceptance suite: one line per criterion, desk scale. Exit 0 iff all pass.

#include <chrono>
#include <iostream>

#include "gen.hpp"
#include "gen_net.hpp"
#include "solace/sd_to_din.hpp"
#include "solace/translate.hpp"

using namespace solace;

namespace {

uint64_t g_seed = 20080311;
int g_failures = 0;

void report(int num, const std::string& what, bool ok, const std::string& extra = "") {
  static auto t0 = std::chrono::steady_clock::now();
  auto t1 = std::chrono::steady_clock::now();
  double secs = std::chrono::duration<double>(t1 - t0).count();
  t0 = t1;
  std::cout << (ok ? "[ ok ]" : "[FAIL]") << " " << num << ". " << what;
  if (!extra.empty()) std::cout << " (" << extra << ")";
  std::cout << "  [" << (int)(secs * 1000) << " ms]" << std::endl;
  if (!ok) g_failures++;
}

const char* kSec12 = "new x.new y.new z.new w.(u!<u x y> | u?<z w w> | v!<z u y>)";
const char* kSec13Pi = "(new x.(u!x.0 | x?y.0)) | u?z.(z!t.0)";
const char* kRedcomp =
    "new u.new x.new y.new z.new y'.new z'.new a.new b.new c.new a'.new b'.new c'."
    "(u!<x y z> | u?<x y' z'> | x!<a b c> | x?<a' b' c'>)";

std::string golden_sec13() {
  std::string P = "new w.new y.( v!<u w y> | new zc1. y?<zc1 zc1 y> | new vp. w!<x vp v> )";
  std::string Q = "new w.new yq.( v!<x w yq> | new zc2. yq?<zc2 zc2 yq> | new y.new vp. w?<y v vp> )";
  std::string R =
      "new w.new y.( v!<u w y> | new zc3. y?<zc3 zc3 y> | new z.new vp.( w?<z v vp> | "
      "new w2.new y2.( vp!<z w2 y2> | new zc4. y2?<zc4 zc4 y2> | new vpp. w2!<t vpp vp> ) ) )";
  return "new v.( new x.( " + P + " | " + Q + " ) | " + R + " | new zc. v?<zc zc v> )";
}

// 1. Golden solos reduction
void criterion1() {
  auto rs = solos::reduce_steps(solos::parse(kSec12));
  bool ok = rs.size() == 1 && solos::congruent(rs[0], solos::parse("new y. v!<u u y>"));
  report(1, "golden solos reduction (sec 1.2 example)", ok);
}

// 2. Golden translation and its reduction chain
void criterion2() {
  auto t = xlate::translate_pi(pi::parse(kSec13Pi));
  bool cong = solos::congruent(t, solos::parse(golden_sec13()));
  auto target = solos::parse("new v.new z. v?<z z v>");
  std::vector<solos::TermP> frontier = {t};
  std::set<std::string> seen = {solos::canonical_key(t)};
  bool reaches = false;
  for (int d = 0; d < 10 && !reaches && !frontier.empty(); d++) {
    std::vector<solos::TermP> next;
    for (auto& cur : frontier) {
      for (auto& r : solos::reduce_steps(cur)) {
        if (!seen.insert(solos::canonical_key(r)).second) continue;
        if (solos::congruent(r, target)) {
          reaches = true;
          break;
        }
        next.push_back(r);
      }
      if (reaches) break;
    }
    frontier = next;
  }
  report(2, "golden translation (sec 1.3) and reduction to new v. Cat v", cong && reaches,
         cong ? (reaches ? "" : "chain incomplete") : "translation not congruent");
}

// 3. Typability of 200 random translations
void criterion3() {
  gen::Rng rng(g_seed + 3);
  int bad = 0;
  for (int i = 0; i < 200; i++) {
    auto P = gen::random_pi(rng, 12);
    auto gamma = typing::gamma_for_pi(pi::free_names(P));
    if (!std::holds_alternative<typing::Derivation>(typing::check_typed(gamma, xlate::translate_pi(P)))) bad++;
  }
  report(3, "typability of 200 random pi translations under Gamma_X", bad == 0,
         bad ? std::to_string(bad) + " failures" : "");
}

// 4. Subject reduction on 200 random typed terms
void criterion4() {
  gen::Rng rng(g_seed + 4);
  int bad = 0;
  for (int i = 0; i < 200; i++) {
    auto t = gen::random_typed_solos(rng, 6);
    auto gamma = gen::context_of(t);
    if (!std::holds_alternative<typing::Derivation>(typing::check_typed(gamma, t))) {
      bad++;
      continue;
    }
    for (auto& r : solos::reduce_steps(t))
      if (!std::holds_alternative<typing::Derivation>(typing::check_typed(gamma, r))) bad++;
  }
  report(4, "subject reduction on 200 random typed solos terms", bad == 0,
         bad ? std::to_string(bad) + " failures" : "");
}

// 5. Acyclicity preservation along random reduction paths
void criterion5() {
  gen::Rng rng(g_seed + 5);
  int bad = 0, terms = 0;
  while (terms < 100) {
    auto P = gen::random_pi(rng, 9);
    auto t = xlate::translate_pi(P);
    auto gamma = typing::gamma_for_pi(pi::free_names(P));
    terms++;
    for (int step = 0; step < 3; step++) {
      auto rs = solos::reduce_steps(t);
      if (rs.empty()) break;
      t = rs[rng() % rs.size()];
      auto chk = typing::check_typed(gamma, t);
      if (!std::holds_alternative<typing::Derivation>(chk)) {
        bad++;
        break;
      }
      if (!typing::check_acyclic(std::get<typing::Derivation>(chk)).pass) bad++;
    }
  }
  report(5, "acyclicity preservation on 100 translated terms, up to 3 steps", bad == 0,
         bad ? std::to_string(bad) + " failures" : "");
}

// 6. Diagram faithfulness on 100 random terms
void criterion6() {
  gen::Rng rng(g_seed + 6);
  int bad = 0;
  for (int i = 0; i < 100; i++) {
    auto P = gen::random_solos(rng);
    auto g = sd::term_to_diagram(P);
    auto term_reducts = solos::reduce_steps(P);
    std::vector<sd::Diagram> diag_reducts;
    for (auto& tr : sd::lts_transitions(g)) {
      if (tr.target.edges.size() != g.edges.size() - 2) bad++;
      diag_reducts.push_back(tr.target);
    }
    if (term_reducts.size() != diag_reducts.size()) {
      bad++;
      continue;
    }
    for (auto& t : term_reducts) {
      bool found = false;
      for (auto& d : diag_reducts) found = found || sd::diagram_iso(sd::term_to_diagram(t), d).has_value();
      if (!found) bad++;
    }
  }
  report(6, "diagram reduction reflects term reduction on 100 random terms", bad == 0,
         bad ? std::to_string(bad) + " mismatches" : "");
}

// 7. ac-membership
void criterion7() {
  gen::Rng rng(g_seed + 7);
  int bad = 0;
  for (int i = 0; i < 25; i++) {
    auto P = gen::random_pi(rng, 7);
    if (sd::is_ac_member(sd::term_to_diagram(xlate::translate_pi(P), true)).kind != sd::AcResult::Member) bad++;
  }
  auto red = sd::is_ac_member(sd::term_to_diagram(solos::parse(kRedcomp), true));
  bool red_ok = red.kind == sd::AcResult::NonMember && !red.offending.empty();
  report(7, "translations are S_L^ac members; the cyclic term is not", bad == 0 && red_ok,
         bad ? std::to_string(bad) + " false members" : (red_ok ? "" : "counterexample missed"));
}

// 8. Toolbox grid
void criterion8() {
  std::string detail;
  bool ok = true;
  for (int n1 = -1; n1 <= 3; n1++)
    for (int n2 = -1; n2 <= 3; n2++)
      if (!toolbox::check_aggregation(n1, n2)) {
        ok = false;
        detail += "agg(" + std::to_string(n1) + "," + std::to_string(n2) + ") ";
      }
  for (int n = 0; n <= 3; n++)
    for (int p = 0; p <= 3; p++)
      if (!toolbox::check_prefix_reduction(n, p, "l", "m")) {
        ok = false;
        detail += "prefix(" + std::to_string(n) + "," + std::to_string(p) + ") ";
      }
  for (int p = -2; p <= 1; p++) {
    auto rep = toolbox::check_forwarding(p, "l", "m");
    if (!rep.ok) {
      ok = false;
      detail += "forward(" + std::to_string(p) + ") ";
    }
  }
  report(8, "toolbox lemmas: aggregation grid, prefix grid, forwarding", ok, detail);
}

// 9. Image normality on 50 translated diagrams
void criterion9() {
  gen::Rng rng(g_seed + 9);
  int bad = 0;
  for (int i = 0; i < 50; i++) {
    auto P = gen::random_pi(rng, 8);
    auto s = sdd::translate_diagram(sd::term_to_diagram(xlate::translate_pi(P), true));
    for (auto& r : din::find_redexes(s)) {
      if (r.cls == din::RuleClass::Structural) {
        bool weak_involved =
            s.cells[r.cell_a].kind == din::CellKind::Weak || s.cells[r.cell_a].kind == din::CellKind::Coweak ||
            s.cells[r.cell_b].kind == din::CellKind::Weak || s.cells[r.cell_b].kind == din::CellKind::Coweak;
        if (!weak_involved) bad++;
      } else if (din::enabled(s, r, din::StepPolicy::deterministic())) {
        bad++;
      }
    }
  }
  report(9, "translated nets have only weakening-side structural d-redexes", bad == 0,
         bad ? std::to_string(bad) + " stray redexes" : "");
}

// 10. Bisimulation squares
void criterion10() {
  gen::Rng rng(g_seed + 10);
  int bad = 0, exhausted = 0, transitions = 0;
  auto run = [&](const sd::Diagram& g) {
    auto rep = sdd::bisim_harness(g);
    if (!rep.ok) bad++;
    for (auto& row : rep.rows) {
      transitions++;
      if (row.exhausted) exhausted++;
      if (row.diagram_side != row.net_side) bad++;
    }
  };
  run(sd::term_to_diagram(xlate::translate_pi(pi::parse(kSec13Pi)), true));
  for (int i = 0; i < 20; i++) {
    auto P = gen::random_pi(rng, 8);
    run(sd::term_to_diagram(xlate::translate_pi(P), true));
  }
  report(10, "bisimulation squares on sec 1.3 and 20 random translations", bad == 0 && exhausted == 0,
         std::to_string(transitions) + " transitions" + (bad ? ", mismatches" : "") +
             (exhausted ? ", budget exhausted" : ""));
}

// 11. Confluence smoke
void criterion11() {
  gen::Rng rng(g_seed + 11);
  std::set<std::string> labels = {"l1", "l2", "l3", "l4", "l5", "l6"};
  din::StepPolicy full = din::StepPolicy::reduction_over(labels, true);
  full.comm_labels = labels;
  int bad = 0;
  auto step = [&](const din::Net& cur, bool first) -> std::optional<din::Net> {
    for (size_t si = 0; si < cur.summands.size(); si++) {
      size_t i = first ? si : cur.summands.size() - 1 - si;
      std::vector<din::Redex> en;
      for (auto& r : din::find_redexes(cur.summands[i]))
        if (din::enabled(cur.summands[i], r, full)) en.push_back(r);
      if (en.empty()) continue;
      din::Redex pick = first ? en.front() : en.back();
      din::Net next;
      next.iface = cur.iface;
      for (size_t j = 0; j < cur.summands.size(); j++)
        if (j != i) next.summands.push_back(cur.summands[j]);
      for (auto& t : din::apply_rule(cur.summands[i], pick).summands) next.summands.push_back(t);
      return next;
    }
    return std::nullopt;
  };
  for (int i = 0; i < 100; i++) {
    auto s = gen::random_net(rng, 6);
    din::Net a = din::as_net(s), b = a;
    for (int k = 0; k < 6; k++) {
      if (auto na = step(a, true)) a = *na;
      if (auto nb = step(b, false)) b = *nb;
    }
    if (din::canonical_key(a) == din::canonical_key(b)) continue;
    auto ca = din::reduce_closure(a, full, 8);
    auto cb = din::reduce_closure(b, full, 8);
    std::set<std::string> ka;
    for (auto& x : ca.reachable) ka.insert(din::canonical_key(x));
    bool joined = false;
    for (auto& y : cb.reachable) joined = joined || ka.count(din::canonical_key(y));
    if (!joined) bad++;
  }
  report(11, "confluence smoke on 100 random nets, two strategies join", bad == 0,
         bad ? std::to_string(bad) + " unjoined" : "");
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; i++) {
    std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc) g_seed = std::stoull(argv[++i]);
  }
  std::cout << "acceptance suite (seed " << g_seed << ")\n";
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  std::cout << (g_failures ? "FAILED" : "PASSED") << " (" << (11 - g_failures) << "/11)\n";
  return g_failures ? 1 : 0;
}
