#pragma once

#include "solace/pi.hpp"
#include "solace/solos.hpp"

namespace solace::xlate {

// Cat v := new z. v?<z z v>
inline solos::TermP cat(const Name& v, NameGen& gen) {
  Name z = gen.fresh("z");
  return solos::nu(z, solos::atom(solos::in(v, z, z, v)), solos::Type::W);
}

inline solos::TermP cat(const Name& v) {
  NameGen gen;
  return cat(v, gen);
}

inline solos::TermP translate_at(const pi::TermP& p, const Name& v, NameGen& gen) {
  using namespace solos;
  switch (p->kind) {
    case pi::Term::Nil:
      return nil();
    case pi::Term::Par:
      return par(translate_at(p->left, v, gen), translate_at(p->right, v, gen));
    case pi::Term::Nu:
      return nu(p->name, translate_at(p->left, v, gen), Type::W);
    case pi::Term::Input: {
      // new w. new y. ( v!<u w y> | Cat y | new x. new v'. ( w?<x v v'> | [P]v' ) )
      Name w = gen.fresh("w"), y = gen.fresh("y"), vp = gen.fresh("v");
      TermP inner = par(atom(in(w, p->name, v, vp)), translate_at(p->left, vp, gen));
      inner = nu(p->name, nu(vp, inner, Type::V), Type::W);
      TermP body = par(atom(out(v, p->subject, w, y)), par(cat(y, gen), inner));
      return nu(w, nu(y, body, Type::V), Type::W);
    }
    case pi::Term::Output: {
      // new w. new y. ( v!<u w y> | Cat y | new v'. ( w!<x v' v> | [P]v' ) )
      Name w = gen.fresh("w"), y = gen.fresh("y"), vp = gen.fresh("v");
      TermP inner = par(atom(out(w, p->name, vp, v)), translate_at(p->left, vp, gen));
      inner = nu(vp, inner, Type::V);
      TermP body = par(atom(out(v, p->subject, w, y)), par(cat(y, gen), inner));
      return nu(w, nu(y, body, Type::V), Type::W);
    }
  }
  return solos::nil();
}

// [P] := new v. ( [P]v | Cat v )
inline solos::TermP translate_pi(const pi::TermP& p) {
  NameGen gen;
  Name v = gen.fresh("v");
  return solos::nu(v, solos::par(translate_at(p, v, gen), cat(v, gen)), solos::Type::V);
}

}  // namespace solace::xlate
