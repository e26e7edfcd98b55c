#include <catch2/catch_amalgamated.hpp>

#include "gen.hpp"
#include "solace/solos.hpp"

using namespace solace;
using solos::parse;

static const char* kSec12 = "new x.new y.new z.new w.(u!<u x y> | u?<z w w> | v!<z u y>)";

TEST_CASE("solos canonicalize") {
  CHECK(solos::congruent(parse("new x.0"), parse("0")));
  auto P = parse("u!<a b c>");
  CHECK(solos::congruent(parse("(0|u!<a b c>)"), P));
  // scope extrusion: (new x.u?<x x x>)|Q  ==  new x.(u?<x x x>|Q) for x not free in Q
  CHECK(solos::congruent(parse("(new x.u?<x x x>) | v!<a b c>"), parse("new x.(u?<x x x> | v!<a b c>)")));
  // canonical form shape: binders then parallel solos
  auto c = solos::canonicalize(parse("(new x.u?<x x x>) | new y.v!<y y y>"));
  auto f = solos::flatten(c);
  CHECK(f.binders.size() == 2);
  CHECK(f.solos.size() == 2);
  // unused binders dropped
  CHECK(solos::flatten(solos::canonicalize(parse("new x.new y.(u!<y y y>)"))).binders.size() == 1);
}

TEST_CASE("solos congruence") {
  CHECK(solos::congruent(parse("u!<a b c> | v?<a a a>"), parse("v?<a a a> | u!<a b c>")));
  CHECK_FALSE(solos::congruent(parse("u!<x y z>"), parse("u?<x y z>")));
  // alpha
  CHECK(solos::congruent(parse("new x.u!<x x x>"), parse("new y.u!<y y y>")));
  CHECK_FALSE(solos::congruent(parse("new x.u!<x x u>"), parse("new y.u!<y u y>")));
}

// brute-force most-general-unifier oracle: sigma's kernel must be contained in
// the kernel of every equalizing substitution
static void check_mgu(const solos::Solo& o, const solos::Solo& i, const std::vector<Name>& bound,
                      const solos::Unifier& u) {
  std::vector<Name> names;
  for (int k = 0; k < 3; k++) {
    names.push_back(o.objects[k]);
    names.push_back(i.objects[k]);
  }
  sort_unique(names);
  auto apply = [&](const std::map<Name, Name>& m, const Name& n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  // sigma equalizes and moves only bound names, idempotently
  for (int k = 0; k < 3; k++)
    CHECK(apply(u.substitution, o.objects[k]) == apply(u.substitution, i.objects[k]));
  for (auto& [from, to] : u.substitution) {
    CHECK(std::find(bound.begin(), bound.end(), from) != bound.end());
    CHECK(u.substitution.find(to) == u.substitution.end());  // idempotent
  }
  // enumerate all candidate substitutions tau: names -> names
  size_t n = names.size();
  std::vector<size_t> idx(n, 0);
  while (true) {
    std::map<Name, Name> tau;
    for (size_t k = 0; k < n; k++)
      if (names[idx[k]] != names[k]) tau[names[k]] = names[idx[k]];
    bool moves_free = false;
    for (auto& [from, to] : tau)
      if (std::find(bound.begin(), bound.end(), from) == bound.end()) moves_free = true;
    bool equalizes = true;
    for (int k = 0; k < 3; k++)
      if (apply(tau, o.objects[k]) != apply(tau, i.objects[k])) equalizes = false;
    if (!moves_free && equalizes) {
      // tau factors through sigma: sigma(a)==sigma(b) => tau(a)==tau(b)
      for (auto& a : names)
        for (auto& b : names)
          if (apply(u.substitution, a) == apply(u.substitution, b))
            CHECK(apply(tau, a) == apply(tau, b));
    }
    size_t k = 0;
    while (k < n && ++idx[k] == n) idx[k++] = 0;
    if (k == n) break;
  }
}

TEST_CASE("solos unification") {
  std::vector<Name> bound = {"x", "y", "z", "w"};
  auto o = solos::out("u", "u", "x", "y");
  auto i = solos::in("u", "z", "w", "w");
  auto u = solos::unify(o, i, bound);
  REQUIRE(u.has_value());
  // classes {u,z} and {x,y,w}
  REQUIRE(u->classes.size() == 2);
  CHECK(u->classes[0] == std::vector<Name>{"u", "z"});
  CHECK(u->classes[1] == std::vector<Name>{"w", "x", "y"});
  CHECK(u->representative.at("z") == "u");
  // all-bound class: outermost binder wins (x)
  CHECK(u->representative.at("w") == "x");
  CHECK(u->substitution.at("z") == "u");
  check_mgu(o, i, bound, *u);

  // already equal: identity substitution
  auto u2 = solos::unify(solos::out("u", "a", "b", "c"), solos::in("u", "a", "b", "c"), {});
  REQUIRE(u2.has_value());
  CHECK(u2->substitution.empty());

  // all-free failure
  solos::UnifyFailure fail;
  auto u3 = solos::unify(solos::out("u", "x", "y", "z"), solos::in("u", "x'", "y'", "z'"), {}, &fail);
  CHECK_FALSE(u3.has_value());

  // same free name in matching positions is fine
  auto u4 = solos::unify(solos::out("u", "x", "y", "z"), solos::in("u", "x", "w", "w"), {"y", "z", "w"});
  REQUIRE(u4.has_value());
  check_mgu(solos::out("u", "x", "y", "z"), solos::in("u", "x", "w", "w"), {"y", "z", "w"}, *u4);

  gen::Rng rng(3);
  std::vector<Name> pool = {"a", "b", "c", "d", "e"};
  for (int t = 0; t < 40; t++) {
    solos::Solo ro = solos::out("s", gen::pick(rng, pool), gen::pick(rng, pool), gen::pick(rng, pool));
    solos::Solo ri = solos::in("s", gen::pick(rng, pool), gen::pick(rng, pool), gen::pick(rng, pool));
    std::vector<Name> bnd;
    for (auto& n : pool)
      if (rng() % 2) bnd.push_back(n);
    auto ru = solos::unify(ro, ri, bnd);
    if (ru) check_mgu(ro, ri, bnd, *ru);
  }
}

TEST_CASE("solos reduction") {
  auto rs = solos::reduce_steps(parse(kSec12));
  REQUIRE(rs.size() == 1);
  CHECK(solos::congruent(rs[0], parse("new y. v!<u u y>")));

  CHECK(solos::reduce_steps(parse("0")).empty());
  CHECK(solos::reduce_steps(parse("u!<x y z> | u?<x' y' z'>")).empty());

  // per step: solo count decreases by exactly 2
  gen::Rng rng(17);
  for (int t = 0; t < 60; t++) {
    auto P = gen::random_solos(rng);
    size_t n = solos::solo_count(P);
    for (auto& r : solos::reduce_steps(P)) CHECK(solos::solo_count(r) == n - 2);
  }
}

TEST_CASE("solos reducts of congruent terms match") {
  gen::Rng rng(23);
  for (int t = 0; t < 40; t++) {
    auto P = gen::random_solos(rng);
    auto Q = solos::canonicalize(P);  // congruent presentation
    REQUIRE(solos::congruent(P, Q));
    auto rp = solos::reduce_steps(P);
    auto rq = solos::reduce_steps(Q);
    REQUIRE(rp.size() == rq.size());
    for (auto& r : rp) {
      bool matched = false;
      for (auto& r2 : rq) matched = matched || solos::congruent(r, r2);
      CHECK(matched);
    }
  }
}

TEST_CASE("solos parse/print round trip") {
  gen::Rng rng(29);
  for (int t = 0; t < 40; t++) {
    auto P = gen::random_solos(rng);
    CHECK(solos::congruent(P, parse(solos::print(P))));
  }
  // labels and annotations survive a round trip
  auto t = parse("new x:W. (u?<x x u>@l1 | u!<x x u>@l2)");
  auto f = solos::flatten(t);
  REQUIRE(f.binders.size() == 1);
  CHECK(f.binders[0].annot == solos::Type::W);
  CHECK(f.solos[0].label + f.solos[1].label == "l1l2");
  auto t2 = parse(solos::print(t));
  CHECK(solos::print(t2) == solos::print(t));
}
