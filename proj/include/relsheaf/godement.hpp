#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relsheaf/sheaf.hpp"

namespace relsheaf {

// ---------------------------------------------------------------------------
// Godement canonical resolution
// ---------------------------------------------------------------------------

// C^0(F): the product of stalks over the minimal open of each point, with
// coordinate-selection restrictions, together with the embedding F -> C^0(F),
// s_x -> (r_{x->y} s_x)_{y in U_x}.
struct GodementStep {
  Sheaf c0;
  SheafMorphism aug;
};

inline GodementStep godement_c0(const Sheaf& f) {
  const FinSpace& sp = f.space();
  GodementStep out;
  out.c0 = Sheaf::product(sp, f.stalk_dims());
  std::vector<Matrix> aug;
  for (int x = 0; x < sp.size(); ++x) {
    Matrix a(out.c0.stalk_dim(x), f.stalk_dim(x));
    int row = 0;
    for (int y = 0; y < sp.size(); ++y) {
      if (!sp.leq(x, y)) continue;
      a.set_block(row, 0, f.res(x, y));
      row += f.stalk_dim(y);
    }
    aug.push_back(std::move(a));
  }
  out.aug = SheafMorphism(f, out.c0, std::move(aug));
  return out;
}

// C^0 applied to a morphism: the product of the stalk components.
inline SheafMorphism godement_c0_map(const Sheaf& c0s, const Sheaf& c0t,
                                     const SheafMorphism& m) {
  const FinSpace& sp = m.source().space();
  std::vector<Matrix> comps;
  for (int x = 0; x < sp.size(); ++x) {
    Matrix c(c0t.stalk_dim(x), c0s.stalk_dim(x));
    int ro = 0, co = 0;
    for (int y = 0; y < sp.size(); ++y) {
      if (!sp.leq(x, y)) continue;
      c.set_block(ro, co, m.comp(y));
      ro += m.target().stalk_dim(y);
      co += m.source().stalk_dim(y);
    }
    comps.push_back(std::move(c));
  }
  return SheafMorphism(c0s, c0t, std::move(comps));
}

// Iterated canonical resolution 0 -> S -> C^0 -> ... -> C^bound. On a finite
// poset of height h the cokernels die out and C^q = 0 for q > h, so any
// bound >= h + 1 carries the full resolution.
struct GodementResolution {
  Sheaf base;
  int bound = 0;
  std::vector<Sheaf> terms;         // C^0 .. C^bound
  SheafMorphism aug;                // S -> C^0
  std::vector<SheafMorphism> diff;  // C^q -> C^{q+1}

  // Iteration internals, kept for functoriality: R_0 = S, R_{q+1} =
  // coker(R_q -> C^q), C^q = C^0(R_q).
  std::vector<Sheaf> rest;
  std::vector<SheafMorphism> rest_aug;
  std::vector<SheafMorphism> rest_proj;
  std::vector<std::vector<Matrix>> rest_reps;

  SheafComplex as_complex() const {
    std::vector<Sheaf> t = terms;
    std::vector<SheafMorphism> d = diff;
    return SheafComplex(std::move(t), std::move(d), false);
  }
};

inline GodementResolution godement_resolve(const Sheaf& s, int bound) {
  check(bound >= 1, errc::bound, "godement bound must be at least 1");
  GodementResolution out;
  out.base = s;
  out.bound = bound;
  Sheaf r = s;
  for (int q = 0; q <= bound; ++q) {
    GodementStep step = godement_c0(r);
    out.rest.push_back(r);
    out.rest_aug.push_back(step.aug);
    out.terms.push_back(step.c0);
    if (q == 0) out.aug = step.aug;
    CokernelSheafData cok = cokernel_sheaf(step.aug);
    out.rest_proj.push_back(cok.projection);
    out.rest_reps.push_back(cok.reps);
    r = cok.sheaf;
  }
  for (int q = 0; q < bound; ++q)
    out.diff.push_back(out.rest_aug[q + 1].compose_with(out.rest_proj[q]));
  return out;
}

// The induced maps C^q(m) for m: S -> T between resolved sheaves.
inline std::vector<SheafMorphism> godement_map(const GodementResolution& rs,
                                               const GodementResolution& rt,
                                               const SheafMorphism& m) {
  check(rs.bound == rt.bound, errc::bound, "godement_map: resolutions of different bounds");
  const FinSpace& sp = m.source().space();
  std::vector<SheafMorphism> out;
  SheafMorphism level = m;
  for (int q = 0; q <= rs.bound; ++q) {
    SheafMorphism cq = godement_c0_map(rs.terms[q], rt.terms[q], level);
    out.push_back(cq);
    if (q == rs.bound) break;
    std::vector<Matrix> comps;
    for (int x = 0; x < sp.size(); ++x)
      comps.push_back(rt.rest_proj[q].comp(x) * (cq.comp(x) * rs.rest_reps[q][x]));
    level = SheafMorphism(rs.rest[q + 1], rt.rest[q + 1], std::move(comps));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flabbiness and relative cohomology
// ---------------------------------------------------------------------------

inline bool flabby_check(const Sheaf& g) {
  uint64_t full = g.space().full_mask();
  for (uint64_t v : g.space().all_upsets())
    if (rank(g.restriction_map(full, v)) != g.sections(v).dim) return false;
  return true;
}

inline int default_bound(const FinSpace& sp) { return sp.height() + 2; }

// H^q(X, X'; S): cohomology of Γ(X, X'; C^•(S)).
struct RelCohomology {
  GodementResolution res;
  SheafComplex res_complex;
  RelativeSectionComplex rel;
  std::vector<int> dims;  // degrees 0 .. bound-1
};

inline RelCohomology rel_cohomology(const Sheaf& s, uint64_t x_prime_mask, int bound) {
  check(bound >= 1, errc::bound, "bound must be at least 1");
  RelCohomology out;
  out.res = godement_resolve(s, bound);
  out.res_complex = out.res.as_complex();
  out.rel = relative_section_complex(out.res_complex, s.space().full_mask(), x_prime_mask);
  CohomologyTable h(out.rel.complex);
  for (int q = 0; q < bound; ++q) out.dims.push_back(h.dim(q));
  // Vanishing above the poset height is structural on finite spaces; a
  // violation means the truncation is unsound, so abort loudly.
  for (int q = s.space().height() + 1; q < bound; ++q)
    check(out.dims[q] == 0, errc::bound,
          "cohomology did not vanish above the poset height at degree " + std::to_string(q));
  Subspace rel0 =
      relative_sections(s, OpenSet::whole(s.space()), OpenSet(s.space(), x_prime_mask));
  check(out.dims.empty() || out.dims[0] == rel0.dim(), errc::validation,
        "H^0 does not equal the relative sections");
  return out;
}

// Absolute cohomology of a sheaf restricted to an open subset, computed on
// the subspace.
inline std::vector<int> cohomology_on_open(const Sheaf& s, uint64_t open_mask, int bound) {
  SubspaceData sub = open_subspace(s.space(), open_mask);
  if (sub.space.size() == 0) return std::vector<int>(size_t(bound), 0);
  Sheaf r = restrict_sheaf(s, sub);
  return rel_cohomology(r, 0, bound).dims;
}

// ---------------------------------------------------------------------------
// Hypercohomology of a sheaf complex and the comparison maps
// ---------------------------------------------------------------------------

// Sheaf-level data of the double complex C^{q1}(K^{q2}): the total complex
// C(K)^n = ⊕_{q1+q2=n} C^{q1}(K^{q2}) with D = δ^G + (-1)^{q1} d_K, the
// embedding κ: K^• -> C(K)^•, and the resolved kernel sheaf S = ker d^0.
struct HyperSheafData {
  SheafComplex k;
  int bound = 0;
  std::vector<GodementResolution> res;           // per K^{q2}
  SheafComplex total_sheaf;                      // C(K)^•
  std::vector<std::vector<SheafMorphism>> incl;  // [q1][q2]
  std::vector<std::vector<SheafMorphism>> proj;
  std::vector<SheafMorphism> kappa;              // K^q -> C(K)^q
  KernelSheafData s;
  GodementResolution s_res;
  std::vector<SheafMorphism> s_into_total;       // C^{q1}(S) -> C(K)^{q1}
  bool kappa_stalk_qis = false;                  // Prop: κ is a qis of sheaf complexes
};

inline HyperSheafData hyper_sheaf_data(const SheafComplex& k, int bound,
                                       bool verify_kappa = true) {
  check(bound >= 1, errc::bound, "bound must be at least 1");
  HyperSheafData out;
  out.k = k;
  out.bound = bound;
  const FinSpace& sp = k.space();

  for (int q2 = 0; q2 <= k.qmax(); ++q2) out.res.push_back(godement_resolve(k.term(q2), bound));
  std::vector<std::vector<SheafMorphism>> dmaps;
  for (int q2 = 0; q2 < k.qmax(); ++q2)
    dmaps.push_back(godement_map(out.res[q2], out.res[q2 + 1], k.diff(q2)));

  int top = bound + k.qmax();
  std::vector<DirectSumData> sums;
  std::vector<std::vector<std::pair<int, int>>> parts;
  for (int n = 0; n <= top; ++n) {
    std::vector<Sheaf> ps;
    std::vector<std::pair<int, int>> ix;
    for (int q1 = 0; q1 <= std::min(n, bound); ++q1) {
      int q2 = n - q1;
      if (q2 < 0 || q2 > k.qmax()) continue;
      ps.push_back(out.res[q2].terms[q1]);
      ix.emplace_back(q1, q2);
    }
    sums.push_back(direct_sum(ps));
    parts.push_back(std::move(ix));
  }
  out.incl.assign(bound + 1, std::vector<SheafMorphism>(k.qmax() + 1));
  out.proj.assign(bound + 1, std::vector<SheafMorphism>(k.qmax() + 1));
  for (int n = 0; n <= top; ++n)
    for (size_t i = 0; i < parts[n].size(); ++i) {
      auto [q1, q2] = parts[n][i];
      out.incl[q1][q2] = sums[n].incl[i];
      out.proj[q1][q2] = sums[n].proj[i];
    }

  std::vector<Sheaf> terms;
  for (int n = 0; n <= top; ++n) terms.push_back(sums[n].sum);
  std::vector<SheafMorphism> diff;
  for (int n = 0; n < top; ++n) {
    std::vector<Matrix> comps;
    for (int x = 0; x < sp.size(); ++x)
      comps.push_back(Matrix::zero(terms[n + 1].stalk_dim(x), terms[n].stalk_dim(x)));
    for (auto [q1, q2] : parts[n]) {
      if (q1 + 1 <= bound) {
        SheafMorphism part = out.incl[q1 + 1][q2]
                                 .compose_with(out.res[q2].diff[q1])
                                 .compose_with(out.proj[q1][q2]);
        for (int x = 0; x < sp.size(); ++x) comps[x] = comps[x] + part.comp(x);
      }
      if (q2 + 1 <= k.qmax()) {
        SheafMorphism part = out.incl[q1][q2 + 1]
                                 .compose_with(dmaps[q2][q1])
                                 .compose_with(out.proj[q1][q2]);
        for (int x = 0; x < sp.size(); ++x)
          comps[x] = comps[x] + (q1 % 2 == 0 ? part.comp(x) : -part.comp(x));
      }
    }
    diff.push_back(SheafMorphism(terms[n], terms[n + 1], std::move(comps), false));
  }
  out.total_sheaf = SheafComplex(terms, diff);  // validates D∘D = 0 pointwise

  for (int q = 0; q <= k.qmax(); ++q)
    out.kappa.push_back(out.incl[0][q].compose_with(out.res[q].rest_aug[0]));
  SheafComplexMap kappa_map(k, out.total_sheaf, out.kappa);  // validates κ chain map
  (void)kappa_map;

  if (k.qmax() >= 1) {
    out.s = kernel_sheaf(k.diff(0));
  } else {
    out.s.sheaf = k.term(0);
    out.s.inclusion = SheafMorphism::identity(k.term(0));
  }
  out.s_res = godement_resolve(out.s.sheaf, bound);
  auto smaps = godement_map(out.s_res, out.res[0], out.s.inclusion);
  for (int q1 = 0; q1 <= bound; ++q1)
    out.s_into_total.push_back(out.incl[q1][0].compose_with(smaps[q1]));

  if (verify_kappa) {
    out.kappa_stalk_qis = true;
    for (int x = 0; x < sp.size(); ++x) {
      Complex ks = k.stalk_complex(x);
      Complex ts = out.total_sheaf.stalk_complex(x);
      std::vector<Matrix> comps;
      for (int q = 0; q <= k.qmax(); ++q) comps.push_back(out.kappa[q].comp(x));
      if (!is_quasi_iso(ChainMap(ks, ts, 0, std::move(comps)))) out.kappa_stalk_qis = false;
    }
  }
  return out;
}

// Section-level package over a nested pair of opens u ⊇ v:
//   φ: H_{d_K}(u,v) -> H(u,v;K^•),  ψ: H(u,v;S) -> H(u,v;K^•),
//   χ = ψ^{-1} ∘ φ when ψ is invertible.
struct HyperSections {
  uint64_t u = 0, v = 0;
  RelativeSectionComplex total_rel, k_rel, s_rel;
  ChainMap phi_chain, psi_chain;
  int qtop = 0;
  std::vector<int> h_dims, hd_dims, hs_dims;
  std::vector<Matrix> phi_h, psi_h, chi_h;
  bool phi_iso = false, psi_iso = false;
};

inline HyperSections hyper_sections(const HyperSheafData& hd, uint64_t u, uint64_t v) {
  HyperSections out;
  out.u = u;
  out.v = v;
  const SheafComplex& k = hd.k;
  out.total_rel = relative_section_complex(hd.total_sheaf, u, v);
  out.k_rel = relative_section_complex(k, u, v);
  out.s_rel = relative_section_complex(hd.s_res.as_complex(), u, v);
  {
    std::vector<Matrix> comps;
    for (int q = 0; q <= k.qmax(); ++q) {
      Matrix m = hd.kappa[q].section_map(u);
      comps.push_back(out.total_rel.linv[q] * (m * out.k_rel.emb[q]));
      check(out.total_rel.emb[q] * comps.back() == m * out.k_rel.emb[q], errc::validation,
            "kappa does not preserve relative sections");
    }
    out.phi_chain = ChainMap(out.k_rel.complex, out.total_rel.complex, 0, std::move(comps));
  }
  {
    std::vector<Matrix> comps;
    for (int q1 = 0; q1 <= hd.bound; ++q1) {
      Matrix m = hd.s_into_total[q1].section_map(u);
      comps.push_back(out.total_rel.linv[q1] * (m * out.s_rel.emb[q1]));
      check(out.total_rel.emb[q1] * comps.back() == m * out.s_rel.emb[q1], errc::validation,
            "psi does not preserve relative sections");
    }
    out.psi_chain = ChainMap(out.s_rel.complex, out.total_rel.complex, 0, std::move(comps));
  }
  out.qtop = hd.bound + k.qmax();
  CohomologyTable ht(out.total_rel.complex), hdk(out.k_rel.complex), hs(out.s_rel.complex);
  out.phi_iso = out.psi_iso = true;
  for (int q = 0; q <= out.qtop; ++q) {
    out.h_dims.push_back(ht.dim(q));
    out.hd_dims.push_back(hdk.dim(q));
    out.hs_dims.push_back(hs.dim(q));
    out.phi_h.push_back(induced_map(out.phi_chain, hdk, ht, q));
    out.psi_h.push_back(induced_map(out.psi_chain, hs, ht, q));
    if (hdk.dim(q) != ht.dim(q) || !is_invertible(out.phi_h.back())) out.phi_iso = false;
    if (hs.dim(q) != ht.dim(q) || !is_invertible(out.psi_h.back())) out.psi_iso = false;
  }
  if (out.psi_iso)
    for (int q = 0; q <= out.qtop; ++q) out.chi_h.push_back(inverse(out.psi_h[q]) * out.phi_h[q]);
  return out;
}

struct HyperCohomology {
  HyperSheafData data;
  HyperSections pair;
};

inline HyperCohomology hypercohomology(const SheafComplex& k, uint64_t x_prime_mask, int bound,
                                       bool verify_kappa = true) {
  HyperCohomology out;
  out.data = hyper_sheaf_data(k, bound, verify_kappa);
  out.pair = hyper_sections(out.data, k.space().full_mask(), x_prime_mask);
  if (!out.pair.psi_iso)
    fail(errc::not_invertible, "psi is not invertible: K^• is not a resolution of ker d^0");
  return out;
}

// ---------------------------------------------------------------------------
// The complex K^•(i) of an open embedding, as a co-mapping cone
// ---------------------------------------------------------------------------

struct OpenEmbeddingComplex {
  Complex kx;            // K^•(X)
  Complex kxp;           // K^•(X')
  ChainMap restriction;  // i^{-1}
  CoConeData cone;       // K^•(i) with alpha*, beta*
  LongExactSequence les;
};

inline OpenEmbeddingComplex open_embedding_complex(const SheafComplex& k, uint64_t x_prime) {
  OpenEmbeddingComplex out;
  uint64_t full = k.space().full_mask();
  out.kx = k.section_complex(full);
  out.kxp = k.section_complex(x_prime);
  out.restriction = k.restriction_chain_map(full, x_prime);
  out.cone = co_mapping_cone(out.restriction);
  out.les = les_from_ses(out.cone.beta_star, out.cone.alpha_star);
  check(out.les.exact, errc::not_exact, "open embedding cone sequence not exact");
  return out;
}

// ρ: Γ(X,X';F^•) -> F^•(i), s -> (s, 0); a quasi-isomorphism for flabby F.
struct CasflasqueReport {
  bool all_flabby = true;
  bool rho_qis = false;
  std::vector<int> dims_rel;
  std::vector<int> dims_cone;
  ChainMap rho;
  OpenEmbeddingComplex emb;
  RelativeSectionComplex rel;
};

inline CasflasqueReport verify_casflasque(const SheafComplex& f, uint64_t x_prime) {
  CasflasqueReport out;
  for (int q = 0; q <= f.qmax(); ++q)
    if (!flabby_check(f.term(q))) out.all_flabby = false;
  check(out.all_flabby, errc::not_flabby, "casflasque requires flabby terms");
  uint64_t full = f.space().full_mask();
  out.emb = open_embedding_complex(f, x_prime);
  out.rel = relative_section_complex(f, full, x_prime);
  std::vector<Matrix> comps;
  for (int q = 0; q <= f.qmax(); ++q) {
    Matrix c(out.emb.cone.cone.dim(q), out.rel.complex.dim(q));
    c.set_block(0, 0, out.rel.emb[q]);
    comps.push_back(std::move(c));
  }
  out.rho = ChainMap(out.rel.complex, out.emb.cone.cone, 0, std::move(comps));
  out.rho_qis = is_quasi_iso(out.rho);
  CohomologyTable hr(out.rel.complex), hc(out.emb.cone.cone);
  for (int q = 0; q <= out.emb.cone.cone.qmax(); ++q) {
    out.dims_rel.push_back(hr.dim(q));
    out.dims_cone.push_back(hc.dim(q));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Long exact sequences of pairs and triples via the canonical resolution
// ---------------------------------------------------------------------------

struct GodementTripleLES {
  RelativeSectionComplex rel_xxp, rel_xxpp, rel_xpxpp;
  ChainMap j_inv, i_inv;
  LongExactSequence les;
};

inline GodementTripleLES godement_triple_les(const SheafComplex& res_complex, uint64_t x,
                                             uint64_t xp, uint64_t xpp) {
  check((xp & ~x) == 0 && (xpp & ~xp) == 0, errc::containment, "triple must be nested opens");
  GodementTripleLES out;
  out.rel_xxp = relative_section_complex(res_complex, x, xp);
  out.rel_xxpp = relative_section_complex(res_complex, x, xpp);
  out.rel_xpxpp = relative_section_complex(res_complex, xp, xpp);
  std::vector<Matrix> jc, ic;
  for (int q = 0; q <= res_complex.qmax(); ++q) {
    Matrix j = out.rel_xxpp.linv[q] * out.rel_xxp.emb[q];
    check(out.rel_xxpp.emb[q] * j == out.rel_xxp.emb[q], errc::validation,
          "j^{-1} escapes the relative subspace");
    jc.push_back(std::move(j));
    Matrix r = res_complex.term(q).restriction_map(x, xp);
    Matrix i = out.rel_xpxpp.linv[q] * (r * out.rel_xxpp.emb[q]);
    check(out.rel_xpxpp.emb[q] * i == r * out.rel_xxpp.emb[q], errc::validation,
          "i^{-1} escapes the relative subspace");
    ic.push_back(std::move(i));
  }
  out.j_inv = ChainMap(out.rel_xxp.complex, out.rel_xxpp.complex, 0, std::move(jc));
  out.i_inv = ChainMap(out.rel_xxpp.complex, out.rel_xpxpp.complex, 0, std::move(ic));
  out.les = les_from_ses(out.j_inv, out.i_inv);
  return out;
}

// ---------------------------------------------------------------------------
// Proposition propfl items (2)-(5)
// ---------------------------------------------------------------------------

struct SheafSES {
  SheafMorphism incl;
  SheafMorphism proj;
};

// The canonical exact sequence 0 -> S -> C^0(S) -> Q_0 -> 0.
inline SheafSES canonical_ses(const Sheaf& s) {
  GodementStep step = godement_c0(s);
  CokernelSheafData cok = cokernel_sheaf(step.aug);
  return SheafSES{step.aug, cok.projection};
}

inline LongExactSequence sheaf_ses_les(const SheafSES& ses, uint64_t x, uint64_t xp, int bound) {
  GodementResolution ra = godement_resolve(ses.incl.source(), bound);
  GodementResolution rb = godement_resolve(ses.incl.target(), bound);
  GodementResolution rc = godement_resolve(ses.proj.target(), bound);
  auto ia = godement_map(ra, rb, ses.incl);
  auto pb = godement_map(rb, rc, ses.proj);
  RelativeSectionComplex rela = relative_section_complex(ra.as_complex(), x, xp);
  RelativeSectionComplex relb = relative_section_complex(rb.as_complex(), x, xp);
  RelativeSectionComplex relc = relative_section_complex(rc.as_complex(), x, xp);
  uint64_t full = ses.incl.source().space().full_mask();
  std::vector<Matrix> ic, pc;
  for (int q = 0; q <= bound; ++q) {
    Matrix mi = ia[q].section_map(full);
    Matrix i = relb.linv[q] * (mi * rela.emb[q]);
    check(relb.emb[q] * i == mi * rela.emb[q], errc::validation, "ses: inclusion not relative");
    ic.push_back(std::move(i));
    Matrix mp = pb[q].section_map(full);
    Matrix p = relc.linv[q] * (mp * relb.emb[q]);
    check(relc.emb[q] * p == mp * relb.emb[q], errc::validation, "ses: projection not relative");
    pc.push_back(std::move(p));
  }
  ChainMap iota(rela.complex, relb.complex, 0, std::move(ic));
  ChainMap proj(relb.complex, relc.complex, 0, std::move(pc));
  return les_from_ses(iota, proj);
}

struct PropflReport {
  bool flabby_vanishing = true;          // (2)
  std::vector<int> flabby_dims;
  bool triple_exact = false;             // (3)
  bool excision_ok = true;               // (4)
  int excision_cases = 0;
  bool ses_les_exact = false;            // (5)
};

inline PropflReport verify_propfl(const Sheaf& s, uint64_t x, uint64_t xp, uint64_t xpp,
                                  int bound, const SheafSES* ses = nullptr) {
  PropflReport out;
  GodementStep step = godement_c0(s);
  check(flabby_check(step.c0), errc::not_flabby, "godement term failed the flabby check");
  out.flabby_dims = rel_cohomology(step.c0, xp, bound).dims;
  for (size_t q = 1; q < out.flabby_dims.size(); ++q)
    if (out.flabby_dims[q] != 0) out.flabby_vanishing = false;
  GodementResolution res = godement_resolve(s, bound);
  out.triple_exact = godement_triple_les(res.as_complex(), x, xp, xpp).les.exact;
  uint64_t closed = x & ~xp;
  auto base = rel_cohomology(s, xp, bound).dims;
  for (uint64_t v : s.space().all_upsets()) {
    if ((closed & ~v) != 0) continue;
    SubspaceData sub = open_subspace(s.space(), v);
    Sheaf rs = restrict_sheaf(s, sub);
    uint64_t vp = 0;
    for (int i = 0; i < sub.space.size(); ++i)
      if (xp >> sub.sub_to_parent[i] & 1) vp |= uint64_t(1) << i;
    auto dims = rel_cohomology(rs, vp, bound).dims;
    ++out.excision_cases;
    if (dims != base) out.excision_ok = false;
  }
  SheafSES canonical;
  if (!ses) {
    canonical = canonical_ses(s);
    ses = &canonical;
  }
  out.ses_les_exact = sheaf_ses_les(*ses, x, xp, bound).exact;
  return out;
}

// ---------------------------------------------------------------------------
// Theorem: for a resolution 0 -> S -> K^• with H^{q2}(X;K^{q1}) = 0 and
// H^{q2}(X';K^{q1}) = 0 for q2 >= 1, there is a canonical isomorphism
// H^q_{d_K}(i) ≅ H^q(X,X';S), proved by a three-row ladder through the
// flabby total complex F = C(K)^•.
// ---------------------------------------------------------------------------

inline SheafComplex restrict_complex(const SheafComplex& k, const SubspaceData& sub) {
  std::vector<Sheaf> terms;
  std::vector<SheafMorphism> diff;
  for (int q = 0; q <= k.qmax(); ++q) terms.push_back(restrict_sheaf(k.term(q), sub));
  for (int q = 0; q < k.qmax(); ++q) diff.push_back(inverse_image(sub.inclusion, k.diff(q)));
  return SheafComplex(std::move(terms), std::move(diff), false);
}

// 0 -> S -> K^0 -> ... exact stalkwise, S the kernel of d^0.
inline bool resolution_audit(const SheafComplex& k, const KernelSheafData& s) {
  for (int x = 0; x < k.space().size(); ++x) {
    std::vector<int> dims{s.sheaf.stalk_dim(x)};
    std::vector<Matrix> diff{s.inclusion.comp(x)};
    for (int q = 0; q <= k.qmax(); ++q) {
      dims.push_back(k.term(q).stalk_dim(x));
      diff.push_back(q < k.qmax() ? k.diff(q).comp(x)
                                  : Matrix::zero(0, k.term(q).stalk_dim(x)));
    }
    Complex aug(-1, std::move(dims), std::move(diff));
    CohomologyTable h(aug);
    for (int q = -1; q <= k.qmax(); ++q)
      if (h.dim(q) != 0) return false;
  }
  return true;
}

struct TheoremThReport {
  bool resolution_ok = false;
  bool vanishing_ok = true;
  std::vector<std::pair<int, int>> vanishing_failures;  // offending (q1, q2)
  std::vector<int> dims_cone;   // H^q_{d_K}(i)
  std::vector<int> dims_rel;    // H^q(X,X';S)
  bool dims_equal = false;
  bool comparison_iso = false;
  bool kappa_cone_iso = false;
  bool rectangles_commute = false;
  bool triangles_commute = false;
  bool parallelograms_commute = false;
  bool left_bottom_anticommutes = false;
  std::vector<Matrix> comparison;  // H^q(K(i)) -> H^q(X,X';S)
};

inline TheoremThReport verify_theorem_th(const SheafComplex& k, uint64_t x_prime, int bound,
                                         bool audit_hypotheses = true) {
  TheoremThReport rep;
  const FinSpace& sp = k.space();
  uint64_t full = sp.full_mask();

  HyperSheafData hk = hyper_sheaf_data(k, bound);
  rep.resolution_ok = resolution_audit(k, hk.s);

  if (audit_hypotheses) {
    for (int q1 = 0; q1 <= k.qmax(); ++q1) {
      auto on_x = rel_cohomology(k.term(q1), 0, bound).dims;
      for (int q2 = 1; q2 < int(on_x.size()); ++q2)
        if (on_x[q2] != 0) {
          rep.vanishing_ok = false;
          rep.vanishing_failures.emplace_back(q1, q2);
        }
      auto on_xp = cohomology_on_open(k.term(q1), x_prime, bound);
      for (int q2 = 1; q2 < int(on_xp.size()); ++q2)
        if (on_xp[q2] != 0) {
          rep.vanishing_ok = false;
          rep.vanishing_failures.emplace_back(q1, q2);
        }
    }
    check(rep.resolution_ok && rep.vanishing_ok, errc::hypothesis_failed,
          "theorem hypotheses failed" );
  }

  SheafComplex f = hk.total_sheaf;

  // Cone complexes for K and F with κ(i) between them.
  OpenEmbeddingComplex cone_k = open_embedding_complex(k, x_prime);
  OpenEmbeddingComplex cone_f = open_embedding_complex(f, x_prime);
  std::vector<Matrix> kx_comps, kxp_comps;
  for (int q = 0; q <= f.qmax(); ++q) {
    kx_comps.push_back(q <= k.qmax() ? hk.kappa[q].section_map(full)
                                     : Matrix::zero(f.term(q).sections(full).dim, 0));
    kxp_comps.push_back(q <= k.qmax() ? hk.kappa[q].section_map(x_prime)
                                      : Matrix::zero(f.term(q).sections(x_prime).dim, 0));
  }
  ChainMap kappa_x(cone_k.kx, cone_f.kx, 0, std::move(kx_comps));
  ChainMap kappa_xp(cone_k.kxp, cone_f.kxp, 0, std::move(kxp_comps));
  ChainMap kappa_cone =
      cone_functoriality(kappa_x, kappa_xp, cone_k.restriction, cone_f.restriction);
  rep.kappa_cone_iso = is_quasi_iso(kappa_cone);

  // F is flabby: ρ_F is a qis and all hyper comparison maps for F invert.
  CasflasqueReport cas = verify_casflasque(f, x_prime);
  check(cas.rho_qis, errc::not_exact, "rho on the flabby total complex is not a qis");
  HyperSheafData hf = hyper_sheaf_data(f, bound, false);
  HyperSections hf_pair = hyper_sections(hf, full, x_prime);
  HyperSections hf_x = hyper_sections(hf, full, 0);
  HyperSections hf_xp = hyper_sections(hf, x_prime, 0);
  check(hf_pair.psi_iso && hf_x.psi_iso && hf_xp.psi_iso, errc::not_invertible,
        "psi for the flabby total complex not invertible");
  check(hf_pair.phi_iso && hf_x.phi_iso && hf_xp.phi_iso, errc::not_invertible,
        "phi for the flabby total complex not invertible");

  // χ for K on X and X' (the hypotheses make these invertible).
  HyperSections hk_x = hyper_sections(hk, full, 0);
  HyperSections hk_xp = hyper_sections(hk, x_prime, 0);
  check(hk_x.psi_iso && hk_xp.psi_iso, errc::not_invertible, "psi for K not invertible");

  // S ≅ S_F := ker(F^0 -> F^1), then conjugate the S_F-side cohomology to
  // the canonical S-side everywhere.
  SheafMorphism s_to_f0 = hk.kappa[0].compose_with(hk.s.inclusion);
  std::vector<Matrix> into_ker;
  for (int x = 0; x < sp.size(); ++x) {
    auto sol = solve_matrix(hf.s.inclusion.comp(x), s_to_f0.comp(x));
    check(sol.has_value(), errc::validation, "S does not land in ker d_F^0");
    into_ker.push_back(*sol);
  }
  SheafMorphism s_iso(hk.s.sheaf, hf.s.sheaf, std::move(into_ker));
  auto s_iso_maps = godement_map(hk.s_res, hf.s_res, s_iso);
  auto conjugate = [&](const RelativeSectionComplex& from, const RelativeSectionComplex& to,
                       uint64_t u) {
    std::vector<Matrix> comps;
    for (int q = 0; q <= bound; ++q) {
      Matrix m = s_iso_maps[q].section_map(u);
      Matrix c = to.linv[q] * (m * from.emb[q]);
      check(to.emb[q] * c == m * from.emb[q], errc::validation,
            "S-conjugation escapes the relative subspace");
      comps.push_back(std::move(c));
    }
    return ChainMap(from.complex, to.complex, 0, std::move(comps));
  };
  HyperSections hk_pair = hyper_sections(hk, full, x_prime);
  ChainMap conj_pair = conjugate(hk_pair.s_rel, hf_pair.s_rel, full);
  ChainMap conj_x = conjugate(hk_x.s_rel, hf_x.s_rel, full);
  ChainMap conj_xp = conjugate(hk_xp.s_rel, hf_xp.s_rel, x_prime);
  check(is_quasi_iso(conj_pair) && is_quasi_iso(conj_x) && is_quasi_iso(conj_xp),
        errc::not_invertible, "S-conjugation is not a qis");

  // Cohomology tables for every node.
  CohomologyTable h_cone_k(cone_k.cone.cone), h_cone_f(cone_f.cone.cone);
  CohomologyTable h_kx(cone_k.kx), h_kxp(cone_k.kxp);
  CohomologyTable h_fx(cone_f.kx), h_fxp(cone_f.kxp);
  CohomologyTable h_rel_f(cas.rel.complex);
  CohomologyTable h_s_pair(hk_pair.s_rel.complex), h_s_x(hk_x.s_rel.complex),
      h_s_xp(hk_xp.s_rel.complex);
  CohomologyTable h_sf_pair(hf_pair.s_rel.complex), h_sf_x(hf_x.s_rel.complex),
      h_sf_xp(hf_xp.s_rel.complex);
  CohomologyTable h_tot_pair(hf_pair.total_rel.complex), h_tot_x(hf_x.total_rel.complex),
      h_tot_xp(hf_xp.total_rel.complex);
  CohomologyTable h_krel_x(hk_x.k_rel.complex), h_krel_xp(hk_xp.k_rel.complex);

  // Middle row: the pair sequence of S.
  GodementTripleLES mid = godement_triple_les(hk.s_res.as_complex(), full, x_prime, 0);
  check(mid.les.exact, errc::not_exact, "pair sequence of S is not exact");

  int qhi = cone_f.cone.cone.qmax() + 1;

  // χ_F diagonals conjugated into the S-side, per degree.
  auto chi_f_of = [&](const HyperSections& hs, const ChainMap& conj, const CohomologyTable& hsf,
                      const CohomologyTable& hss, const CohomologyTable& htot,
                      const CohomologyTable& hgamma, int q) {
    Matrix phi = induced_map(hs.phi_chain, hgamma, htot, q);
    Matrix psi = induced_map(hs.psi_chain, hsf, htot, q);
    Matrix cj = induced_map(conj, hss, hsf, q);
    return inverse(cj) * (inverse(psi) * phi);
  };
  // χ_K on X and X': ψ_K^{-1} φ_K, directly in S coordinates.
  auto chi_k_of = [&](const HyperSections& hs, int q) {
    if (q < 0 || q > hs.qtop) return Matrix();
    return inverse(hs.psi_h[q]) * hs.phi_h[q];
  };

  // Note: Γ(X;F^•) is cone_f.kx and also hf_x.k_rel (relative to ∅); their
  // canonical coordinates agree because the relative subspace of ∅ is the
  // whole space with the identity embedding. Same for X' and for K.
  rep.comparison_iso = true;
  rep.dims_equal = true;
  rep.rectangles_commute = true;
  rep.triangles_commute = true;
  rep.parallelograms_commute = true;
  rep.left_bottom_anticommutes = true;
  CohomologyTable h_kxp_shift(shift(cone_k.kxp, -1)), h_fxp_shift(shift(cone_f.kxp, -1));

  std::vector<Matrix> c_f;  // H^q(F(i)) -> H^q(X,X';S)
  for (int q = 0; q <= qhi; ++q) {
    Matrix rho_h = induced_map(cas.rho, h_rel_f, h_cone_f, q);
    Matrix phi_h = induced_map(hf_pair.phi_chain, h_rel_f, h_tot_pair, q);
    Matrix psi_h = induced_map(hf_pair.psi_chain, h_sf_pair, h_tot_pair, q);
    Matrix conj_h = induced_map(conj_pair, h_s_pair, h_sf_pair, q);
    check(is_invertible(rho_h) && is_invertible(psi_h) && is_invertible(conj_h),
          errc::not_invertible, "comparison legs not invertible");
    c_f.push_back(inverse(conj_h) * inverse(psi_h) * phi_h * inverse(rho_h));
  }

  for (int q = 0; q <= qhi; ++q) {
    Matrix kci = induced_map(kappa_cone, h_cone_k, h_cone_f, q);
    Matrix c = c_f[q] * kci;
    rep.comparison.push_back(c);
    rep.dims_equal = rep.dims_equal && (h_cone_k.dim(q) == h_s_pair.dim(q));
    if (h_cone_k.dim(q) != h_s_pair.dim(q) || !is_invertible(c)) rep.comparison_iso = false;

    // Rectangles between the two cone sequences.
    Matrix top_alpha = induced_map(cone_k.cone.alpha_star, h_cone_k, h_kx, q);
    Matrix bot_alpha = induced_map(cone_f.cone.alpha_star, h_cone_f, h_fx, q);
    Matrix kx_h = induced_map(kappa_x, h_kx, h_fx, q);
    Matrix kxp_h = induced_map(kappa_xp, h_kxp, h_fxp, q);
    Matrix kxp_h_prev = induced_map(kappa_xp, h_kxp, h_fxp, q - 1);
    Matrix top_beta = induced_map(cone_k.cone.beta_star, h_kxp_shift, h_cone_k, q);
    Matrix bot_beta = induced_map(cone_f.cone.beta_star, h_fxp_shift, h_cone_f, q);
    Matrix top_i = induced_map(cone_k.restriction, h_kx, h_kxp, q);
    Matrix bot_i = induced_map(cone_f.restriction, h_fx, h_fxp, q);
    if (bot_alpha * kci != kx_h * top_alpha) rep.rectangles_commute = false;
    if (kci * top_beta != bot_beta * kxp_h_prev) rep.rectangles_commute = false;
    if (bot_i * kx_h != kxp_h * top_i) rep.rectangles_commute = false;

    // Triangles: χ_K = χ_F ∘ κ on the X and X' columns. Γ(X;F^•) relative to
    // the empty set is literally the section complex of F over X, so the
    // tables of cone_f.kx/kxp serve as the φ sources.
    Matrix chi_kx = chi_k_of(hk_x, q);
    Matrix chi_kxp = chi_k_of(hk_xp, q);
    Matrix chi_fx = chi_f_of(hf_x, conj_x, h_sf_x, h_s_x, h_tot_x, h_fx, q);
    Matrix chi_fxp = chi_f_of(hf_xp, conj_xp, h_sf_xp, h_s_xp, h_tot_xp, h_fxp, q);
    if (chi_fx * kx_h != chi_kx) rep.triangles_commute = false;
    if (chi_fxp * kxp_h != chi_kxp) rep.triangles_commute = false;

    // Parallelograms into the middle row (F side, plus the K side through c).
    Matrix mid_j = mid.les.iota_at(q);
    Matrix mid_i = mid.les.phi_at(q);
    if (mid_j * c_f[q] != chi_fx * bot_alpha) rep.parallelograms_commute = false;
    if (mid_i * chi_fx != chi_fxp * bot_i) rep.parallelograms_commute = false;
    if (mid_j * c != chi_kx * top_alpha) rep.parallelograms_commute = false;
    if (mid_i * chi_kx != chi_kxp * top_i) rep.parallelograms_commute = false;

    // Left-bottom parallelogram anti-commutes: c ∘ β* = -δ ∘ χ'.
    if (q >= 1) {
      Matrix mid_delta = mid.les.delta_at(q - 1);
      Matrix chi_fxp_prev = chi_f_of(hf_xp, conj_xp, h_sf_xp, h_s_xp, h_tot_xp, h_fxp, q - 1);
      Matrix chi_kxp_prev = chi_k_of(hk_xp, q - 1);
      if (c_f[q] * bot_beta != -(mid_delta * chi_fxp_prev))
        rep.left_bottom_anticommutes = false;
      if (c * top_beta != -(mid_delta * chi_kxp_prev)) rep.left_bottom_anticommutes = false;
    }
  }

  for (int q = 0; q <= qhi; ++q) {
    rep.dims_cone.push_back(h_cone_k.dim(q));
    rep.dims_rel.push_back(h_s_pair.dim(q));
  }
  return rep;
}

}  // namespace relsheaf
