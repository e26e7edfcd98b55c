// solace: a workbench for the pi-calculus, the triadic solos calculus, solo
// diagrams and differential interaction nets.
//
// Exit codes: 0 success, 1 checked failure (violation or mismatch),
// 2 usage or parse error, 3 budget exhausted.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "solace/sd_to_din.hpp"
#include "solace/translate.hpp"
#include "solace/typing.hpp"

using namespace solace;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool looks_like_diagram(const std::string& text) {
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    return tok == "node" || tok == "edge" || tok == "ident";
  }
  return false;
}

sd::Diagram load_diagram(const std::string& path, bool want_labels) {
  std::string text = read_file(path);
  if (looks_like_diagram(text)) return sd::from_text(text);
  return sd::term_to_diagram(solos::parse(text), want_labels);
}

int depth_or_env(int depth) {
  if (depth > 0) return depth;
  if (const char* env = getenv("SOLACE_DEPTH")) return std::max(1, atoi(env));
  return 0;  // operation defaults
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solos / solo-diagram / differential-interaction-net workbench"};
  app.require_subcommand(1);

  std::string file, lang, what;
  bool all = false, trace = false, infer = false;
  int depth = 0;
  size_t budget = 100000;

  auto* cmd_parse = app.add_subcommand("parse", "parse a term and print it back");
  cmd_parse->add_option("lang", lang, "pi|solos")->required()->check(CLI::IsMember({"pi", "solos"}));
  cmd_parse->add_option("file", file, "term file or -")->required();

  auto* cmd_translate = app.add_subcommand("translate", "translate a pi term into typed solos");
  std::string direction;
  cmd_translate->add_option("direction", direction, "pi-to-solos")->required()
      ->check(CLI::IsMember({"pi-to-solos"}));
  cmd_translate->add_option("file", file)->required();

  auto* cmd_reduce = app.add_subcommand("reduce", "one-step or traced reduction");
  cmd_reduce->add_option("lang", lang, "pi|solos|diagram|net")->required()
      ->check(CLI::IsMember({"pi", "solos", "diagram", "net"}));
  cmd_reduce->add_option("file", file)->required();
  cmd_reduce->add_flag("--all", all, "print every one-step reduct");
  cmd_reduce->add_flag("--trace", trace, "iterate first reducts to a normal form");

  auto* cmd_typecheck = app.add_subcommand("typecheck", "check or infer V/W types for a solos term");
  cmd_typecheck->add_option("file", file)->required();
  cmd_typecheck->add_flag("--infer", infer, "infer annotations and a context");

  auto* cmd_acyclic = app.add_subcommand("acyclic", "AC1..AC5 report for a solos term");
  cmd_acyclic->add_option("file", file)->required();

  auto* cmd_acmember = app.add_subcommand("ac-member", "membership in the acyclic transition system");
  cmd_acmember->add_option("file", file)->required();
  cmd_acmember->add_option("--budget", budget, "state budget");

  auto* cmd_todiag = app.add_subcommand("to-diagram", "solos term to solo diagram");
  cmd_todiag->add_option("file", file)->required();

  auto* cmd_tonet = app.add_subcommand("to-net", "solos term or diagram to a differential interaction net");
  cmd_tonet->add_option("file", file)->required();

  auto* cmd_dot = app.add_subcommand("dot", "DOT drawing");
  cmd_dot->add_option("what", what, "diagram|net")->required()->check(CLI::IsMember({"diagram", "net"}));
  cmd_dot->add_option("file", file)->required();

  auto* cmd_bisim = app.add_subcommand("bisim", "square harness between S_L^ac and D_L");
  cmd_bisim->add_option("file", file)->required();
  cmd_bisim->add_option("--depth", depth, "net-side search depth");
  cmd_bisim->add_option("--budget", budget, "ac-membership state budget");

  auto* cmd_toolbox = app.add_subcommand("toolbox", "aggregation / forwarding / prefix lemma checks");
  std::string lemma;
  std::vector<int> params;
  cmd_toolbox->add_option("lemma", lemma, "aggregate|forward|prefix")->required()
      ->check(CLI::IsMember({"aggregate", "forward", "prefix"}));
  cmd_toolbox->add_option("params", params, "aggregate N1 N2 | forward P | prefix N P");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_parse) {
      if (lang == "pi")
        std::cout << pi::print(pi::parse(read_file(file))) << "\n";
      else
        std::cout << solos::print(solos::parse(read_file(file))) << "\n";
      return kOk;
    }

    if (*cmd_translate) {
      auto p = pi::parse(read_file(file));
      std::cout << solos::print(xlate::translate_pi(p)) << "\n";
      return kOk;
    }

    if (*cmd_reduce) {
      if (lang == "pi" || lang == "solos") {
        auto run = [&](auto term, auto reduce_fn, auto print_fn) {
          if (trace) {
            auto cur = term;
            int steps = depth_or_env(depth);
            if (steps <= 0) steps = 1000;
            std::cout << print_fn(cur) << "\n";
            for (int i = 0; i < steps; i++) {
              auto r = reduce_fn(cur);
              if (r.empty()) break;
              cur = r[0];
              std::cout << print_fn(cur) << "\n";
            }
            return kOk;
          }
          auto rs = reduce_fn(term);
          if (rs.empty()) {
            std::cout << "(no reduction)\n";
            return kOk;
          }
          size_t n = all ? rs.size() : 1;
          for (size_t i = 0; i < n; i++) std::cout << print_fn(rs[i]) << "\n";
          return kOk;
        };
        if (lang == "pi")
          return run(
              pi::parse(read_file(file)), [](const pi::TermP& t) { return pi::reduce_steps(t); },
              [](const pi::TermP& t) { return pi::print(t); });
        return run(
            solos::parse(read_file(file)), [](const solos::TermP& t) { return solos::reduce_steps(t); },
            [](const solos::TermP& t) { return solos::print(t); });
      }
      if (lang == "diagram") {
        auto g = load_diagram(file, false);
        auto ts = sd::lts_transitions(g);
        if (ts.empty()) {
          std::cout << "(no reduction)\n";
          return kOk;
        }
        size_t n = all ? ts.size() : 1;
        for (size_t i = 0; i < n; i++) {
          if (g.labeled())
            std::cout << "# transition (" << ts[i].input_label << "," << ts[i].output_label << ")\n";
          std::cout << sd::to_text(ts[i].target);
        }
        return kOk;
      }
      // nets: fire enabled redexes under the full label set
      auto s = din::from_text(read_file(file));
      std::set<std::string> labels;
      for (auto& c : s.cells)
        if (!c.label.empty()) labels.insert(c.label);
      din::StepPolicy pol = din::StepPolicy::reduction_over(labels, true);
      pol.comm_labels = labels;
      auto rs = din::find_redexes(s);
      std::vector<din::Redex> en;
      for (auto& r : rs)
        if (din::enabled(s, r, pol)) en.push_back(r);
      if (en.empty()) {
        std::cout << "(no reduction)\n";
        return kOk;
      }
      size_t n = all ? en.size() : 1;
      for (size_t i = 0; i < n; i++) {
        std::cout << "# redex " << en[i].cell_a << "/" << en[i].cell_b << "\n";
        std::cout << din::to_text(din::apply_rule(s, en[i]));
      }
      return kOk;
    }

    if (*cmd_typecheck) {
      auto t = solos::parse(read_file(file));
      auto inf = typing::infer_types(t);
      if (std::holds_alternative<typing::InferFailure>(inf)) {
        auto& f = std::get<typing::InferFailure>(inf);
        std::cerr << "untypable: " << f.message << "\n";
        if (f.a) std::cerr << "  solo: " << solos::print_solo(*f.a, {}) << "\n";
        if (f.b) std::cerr << "  conflicts with: " << solos::print_solo(*f.b, {}) << "\n";
        return kFail;
      }
      auto& ok = std::get<typing::Inferred>(inf);
      if (infer) {
        std::cout << solos::print(ok.term) << "\n";
      }
      std::cout << "context:";
      for (auto& [n, ty] : ok.gamma) std::cout << " " << n << ":" << solos::type_char(ty);
      std::cout << "\n";
      for (auto& st : ok.derivation.solos) {
        std::cout << solos::print_solo(st.solo, {}) << "  subject:" << solos::type_char(st.subject_type)
                  << " protocols:";
        for (auto p : st.protocols) std::cout << typing::protocol_char(p);
        std::cout << "\n";
      }
      return kOk;
    }

    if (*cmd_acyclic) {
      auto t = solos::parse(read_file(file));
      auto inf = typing::infer_types(t);
      if (std::holds_alternative<typing::InferFailure>(inf)) {
        std::cerr << "untypable: " << std::get<typing::InferFailure>(inf).message << "\n";
        return kFail;
      }
      auto rep = typing::check_acyclic(std::get<typing::Inferred>(inf).derivation);
      if (rep.pass) {
        std::cout << "acyclic: AC1..AC5 hold\n";
        return kOk;
      }
      std::cout << "violation " << rep.condition << ": " << rep.witness << "\n";
      return kFail;
    }

    if (*cmd_acmember) {
      auto g = load_diagram(file, true);
      auto res = sd::is_ac_member(g, budget);
      switch (res.kind) {
        case sd::AcResult::Member:
          std::cout << "member of S_L^ac\n";
          return kOk;
        case sd::AcResult::NonMember: {
          std::cout << "not a member; witness path:";
          for (auto& st : res.path) std::cout << " (" << st.input_label << "," << st.output_label << ")";
          std::cout << "\n  " << res.offending << "\n";
          return kFail;
        }
        case sd::AcResult::BudgetExceeded:
          std::cout << "budget exhausted\n";
          return kBudget;
      }
    }

    if (*cmd_todiag) {
      std::cout << sd::to_text(load_diagram(file, true));
      return kOk;
    }

    if (*cmd_tonet) {
      auto g = load_diagram(file, true);
      std::cout << din::to_text(sdd::translate_diagram(g));
      return kOk;
    }

    if (*cmd_dot) {
      if (what == "diagram") {
        std::cout << sd::to_dot(load_diagram(file, false));
      } else {
        std::cout << din::to_dot(din::from_text(read_file(file)));
      }
      return kOk;
    }

    if (*cmd_bisim) {
      auto g = load_diagram(file, true);
      auto rep = sdd::bisim_harness(g, depth_or_env(depth), budget);
      std::cout << sdd::harness_table(rep);
      if (rep.budget_exceeded) return kBudget;
      return rep.ok ? kOk : kFail;
    }

    if (*cmd_toolbox) {
      if (lemma == "aggregate") {
        if (params.size() != 2) {
          std::cerr << "usage: toolbox aggregate N1 N2\n";
          return kUsage;
        }
        bool ok = toolbox::check_aggregation(params[0], params[1]);
        std::cout << "aggregation(" << params[0] << "," << params[1] << ") -> order "
                  << params[0] + params[1] << ": " << (ok ? "ok" : "FAIL") << "\n";
        return ok ? kOk : kFail;
      }
      if (lemma == "forward") {
        if (params.size() != 1) {
          std::cerr << "usage: toolbox forward P\n";
          return kUsage;
        }
        auto rep = toolbox::check_forwarding(params[0], "l", "m");
        std::cout << "forwarding(p=" << params[0] << "): " << (rep.ok ? "ok" : "FAIL") << ", "
                  << rep.total_summands << " summands, " << rep.communicating << " communicating\n";
        if (!rep.ok) std::cout << "  " << rep.detail << "\n";
        return rep.ok ? kOk : kFail;
      }
      if (params.size() != 2) {
        std::cerr << "usage: toolbox prefix N P\n";
        return kUsage;
      }
      bool ok = toolbox::check_prefix_reduction(params[0], params[1], "l", "m");
      std::cout << "prefix(" << params[0] << "," << params[1] << "): " << (ok ? "ok" : "FAIL") << "\n";
      return ok ? kOk : kFail;
    }
  } catch (const parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
