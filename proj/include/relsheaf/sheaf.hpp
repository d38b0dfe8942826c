#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relsheaf/complex.hpp"
#include "relsheaf/finspace.hpp"
#include "relsheaf/matrix.hpp"

namespace relsheaf {

// Coordinates of ⊕_{x in mask} F_x, points ascending.
struct StalkLayout {
  std::vector<int> points;
  std::vector<int> offset;
  int total = 0;
};

// Sections of a sheaf over an open set, as a subspace of the product of
// stalks: emb embeds section coordinates, linv is a left inverse of emb.
struct SectionSpace {
  int dim = 0;
  Matrix emb;
  Matrix linv;
};

// Sheaf of finite dimensional Q-vector spaces on a finite T0 space: stalk
// F_x = F(U_x) per point and a restriction matrix r_{x->y}: F_x -> F_y for
// every comparable pair, functorial by construction check.
//
// A sheaf may carry a product structure: F_x = ⊕_{y in U_x} fib_y with the
// restrictions acting as coordinate selections. Godement sheaves are of this
// shape and it makes their section spaces free, which both speeds things up
// and gives the canonical coordinates that the partition-of-unity operators
// act on.
class Sheaf {
 public:
  Sheaf() = default;

  static Sheaf from_stalks(FinSpace space, std::vector<int> stalk_dims,
                           std::map<std::pair<int, int>, Matrix> res_on_pairs,
                           bool given_on_hasse_only = true) {
    auto d = std::make_shared<Data>();
    d->space = std::move(space);
    d->stalk = std::move(stalk_dims);
    int n = d->space.size();
    check(int(d->stalk.size()) == n, errc::validation, "stalk dims size mismatch");
    for (int x = 0; x < n; ++x) d->res[key(n, x, x)] = Matrix::identity(d->stalk[x]);
    for (auto& [xy, m] : res_on_pairs) {
      auto [x, y] = xy;
      check(d->space.leq(x, y), errc::validation, "restriction on a non-comparable pair");
      check(m.rows() == d->stalk[y] && m.cols() == d->stalk[x], errc::validation,
            "restriction matrix shape for " + d->space.name(x) + "->" + d->space.name(y));
      d->res[key(n, x, y)] = m;
    }
    if (given_on_hasse_only) complete_by_composition(*d);
    verify_functorial(*d);
    return Sheaf(std::move(d));
  }

  static Sheaf constant(const FinSpace& space, int dim) {
    std::vector<int> fib(space.size(), 0);
    // The constant sheaf is not of product shape; build stalks directly.
    auto d = std::make_shared<Data>();
    d->space = space;
    d->stalk.assign(space.size(), dim);
    int n = space.size();
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (space.leq(x, y)) d->res[key(n, x, y)] = Matrix::identity(dim);
    return Sheaf(std::move(d));
  }

  static Sheaf zero(const FinSpace& space) { return constant(space, 0); }

  // Stalks V on the closure of p, zero outside, identity restrictions inside.
  static Sheaf skyscraper(const FinSpace& space, int p, int dim) {
    auto d = std::make_shared<Data>();
    d->space = space;
    int n = space.size();
    d->stalk.assign(n, 0);
    for (int y = 0; y < n; ++y)
      if (space.leq(y, p)) d->stalk[y] = dim;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (space.leq(x, y)) d->res[key(n, x, y)] = Matrix::zero(d->stalk[y], d->stalk[x]);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        if (space.leq(x, y) && space.leq(x, p) && space.leq(y, p))
          d->res[key(n, x, y)] = Matrix::identity(dim);
    verify_functorial(*d);
    return Sheaf(std::move(d));
  }

  // F_x = ⊕_{y in U_x} fib_y with selection restrictions.
  static Sheaf product(const FinSpace& space, std::vector<int> fibers) {
    auto d = std::make_shared<Data>();
    d->space = space;
    int n = space.size();
    check(int(fibers.size()) == n, errc::validation, "fiber dims size mismatch");
    d->fibers = fibers;
    d->stalk.assign(n, 0);
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y)
        if (space.leq(x, y)) d->stalk[x] += fibers[y];
    }
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (!space.leq(x, y)) continue;
        Matrix r(d->stalk[y], d->stalk[x]);
        int row = 0;
        for (int z = 0; z < n; ++z) {
          if (!space.leq(y, z)) continue;
          int col = stalk_offset_of(space, fibers, x, z);
          for (int k = 0; k < fibers[z]; ++k) r(row + k, col + k) = 1;
          row += fibers[z];
        }
        d->res[key(n, x, y)] = std::move(r);
      }
    return Sheaf(std::move(d));
  }

  const FinSpace& space() const { return d_->space; }
  int stalk_dim(int x) const { return d_->stalk[x]; }
  const std::vector<int>& stalk_dims() const { return d_->stalk; }
  const Matrix& res(int x, int y) const {
    auto it = d_->res.find(key(d_->space.size(), x, y));
    check(it != d_->res.end(), errc::validation, "missing restriction");
    return it->second;
  }
  bool is_product() const { return d_->fibers.has_value(); }
  const std::vector<int>& fibers() const {
    check(is_product(), errc::not_product_type, "sheaf has no product structure");
    return *d_->fibers;
  }

  StalkLayout layout(uint64_t mask) const {
    StalkLayout l;
    for (int x = 0; x < d_->space.size(); ++x)
      if (mask >> x & 1) {
        l.points.push_back(x);
        l.offset.push_back(l.total);
        l.total += d_->stalk[x];
      }
    return l;
  }

  // Offset of point z's fiber block inside section coordinates over mask.
  int section_fiber_offset(uint64_t mask, int z) const {
    const auto& fib = fibers();
    int off = 0;
    for (int y = 0; y < z; ++y)
      if (mask >> y & 1) off += fib[y];
    check(mask >> z & 1, errc::validation, "point not in open set");
    return off;
  }

  const SectionSpace& sections(uint64_t mask) const {
    std::lock_guard<std::mutex> lock(d_->mu);
    auto it = d_->sections.find(mask);
    if (it != d_->sections.end()) return it->second;
    SectionSpace s = compute_sections(mask);
    return d_->sections.emplace(mask, std::move(s)).first->second;
  }
  const SectionSpace& sections(const OpenSet& u) const {
    check(u.space == space(), errc::validation, "sections: open set on wrong space");
    return sections(u.mask);
  }

  // Sections over V from sections over U, V ⊆ U.
  Matrix restriction_map(uint64_t u, uint64_t v) const {
    check((v & ~u) == 0, errc::not_containing, "restriction: V not inside U");
    {
      std::lock_guard<std::mutex> lock(d_->mu);
      auto it = d_->restrictions.find({u, v});
      if (it != d_->restrictions.end()) return it->second;
    }
    const SectionSpace& su = sections(u);
    const SectionSpace& sv = sections(v);
    StalkLayout lu = layout(u), lv = layout(v);
    Matrix p(lv.total, lu.total);
    for (size_t i = 0; i < lv.points.size(); ++i) {
      int x = lv.points[i];
      int uoff = -1;
      for (size_t j = 0; j < lu.points.size(); ++j)
        if (lu.points[j] == x) uoff = lu.offset[j];
      for (int k = 0; k < d_->stalk[x]; ++k) p(lv.offset[i] + k, uoff + k) = 1;
    }
    Matrix r = sv.linv * (p * su.emb);
    check(sv.emb * r == p * su.emb, errc::validation, "restriction not a section map");
    std::lock_guard<std::mutex> lock(d_->mu);
    return d_->restrictions.emplace(std::make_pair(u, v), std::move(r)).first->second;
  }

  bool same_data(const Sheaf& o) const { return d_ == o.d_; }

  // Structural equality: same space, stalks and restriction matrices.
  bool operator==(const Sheaf& o) const {
    if (same_data(o)) return true;
    if (!(space() == o.space()) || stalk_dims() != o.stalk_dims()) return false;
    for (int x = 0; x < space().size(); ++x)
      for (int y = 0; y < space().size(); ++y)
        if (space().leq(x, y) && res(x, y) != o.res(x, y)) return false;
    return true;
  }

 private:
  struct Data {
    FinSpace space;
    std::vector<int> stalk;
    std::map<uint64_t, Matrix> res;
    std::optional<std::vector<int>> fibers;
    mutable std::map<uint64_t, SectionSpace> sections;
    mutable std::map<std::pair<uint64_t, uint64_t>, Matrix> restrictions;
    mutable std::mutex mu;
  };

  static uint64_t key(int n, int x, int y) { return uint64_t(x) * n + y; }

  static int stalk_offset_of(const FinSpace& sp, const std::vector<int>& fibers, int x, int z) {
    int off = 0;
    for (int y = 0; y < z; ++y)
      if (sp.leq(x, y)) off += fibers[y];
    return off;
  }

  static void complete_by_composition(Data& d) {
    int n = d.space.size();
    auto edges = d.space.hasse_edges(d.space.full_mask());
    for (bool changed = true; changed;) {
      changed = false;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          if (!d.space.leq(x, y) || d.res.count(key(n, x, y))) continue;
          for (auto [a, b] : edges) {
            if (a != x || !d.space.leq(b, y)) continue;
            if (!d.res.count(key(n, x, b)) || !d.res.count(key(n, b, y))) continue;
            d.res[key(n, x, y)] = d.res.at(key(n, b, y)) * d.res.at(key(n, x, b));
            changed = true;
            break;
          }
        }
    }
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        check(!d.space.leq(x, y) || d.res.count(key(n, x, y)), errc::validation,
              "restriction data does not generate all comparable pairs");
  }

  static void verify_functorial(const Data& d) {
    int n = d.space.size();
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (!d.space.leq(x, y)) continue;
        for (int z = 0; z < n; ++z) {
          if (!d.space.leq(y, z)) continue;
          check(d.res.at(key(n, y, z)) * d.res.at(key(n, x, y)) == d.res.at(key(n, x, z)),
                errc::validation,
                "restrictions not functorial through " + d.space.name(y));
        }
      }
  }

  SectionSpace compute_sections(uint64_t mask) const {
    SectionSpace s;
    StalkLayout l = layout(mask);
    if (l.total == 0) {
      s.dim = 0;
      s.emb = Matrix(0, 0);
      s.linv = Matrix(0, 0);
      return s;
    }
    if (is_product()) {
      const auto& fib = *d_->fibers;
      int dim = 0;
      for (int z : l.points) dim += fib[z];
      s.dim = dim;
      s.emb = Matrix(l.total, dim);
      s.linv = Matrix(dim, l.total);
      // Column (z, k) has a 1 in every stalk block (x, slot of z).
      int col0 = 0;
      std::vector<int> colof(d_->space.size(), -1);
      for (int z : l.points) {
        colof[z] = col0;
        col0 += fib[z];
      }
      for (size_t i = 0; i < l.points.size(); ++i) {
        int x = l.points[i];
        int row = l.offset[i];
        for (int z = 0; z < d_->space.size(); ++z) {
          if (!d_->space.leq(x, z)) continue;
          for (int k = 0; k < fib[z]; ++k) s.emb(row + k, colof[z] + k) = 1;
          if (z == x)
            for (int k = 0; k < fib[z]; ++k) s.linv(colof[z] + k, row + k) = 1;
          row += fib[z];
        }
      }
      return s;
    }
    // Generic path: the limit cut out by the compatibility equations along
    // Hasse edges of the induced subposet.
    auto edges = d_->space.hasse_edges(mask);
    int neq = 0;
    for (auto [x, y] : edges) neq += d_->stalk[y];
    Matrix compat(neq, l.total);
    auto offset_of = [&](int p) {
      for (size_t i = 0; i < l.points.size(); ++i)
        if (l.points[i] == p) return l.offset[i];
      return -1;
    };
    int row = 0;
    for (auto [x, y] : edges) {
      const Matrix& r = res(x, y);
      int ox = offset_of(x), oy = offset_of(y);
      for (int i = 0; i < d_->stalk[y]; ++i) {
        for (int j = 0; j < d_->stalk[x]; ++j) compat(row + i, ox + j) = r(i, j);
        compat(row + i, oy + i) -= 1;
      }
      row += d_->stalk[y];
    }
    Subspace ker = kernel(compat);
    s.dim = ker.dim();
    s.emb = ker.basis;
    s.linv = s.dim > 0 ? left_inverse(s.emb) : Matrix(0, l.total);
    return s;
  }

  explicit Sheaf(std::shared_ptr<Data> d) : d_(std::move(d)) {}
  std::shared_ptr<Data> d_;

  friend Sheaf with_product_structure(Sheaf s, std::vector<int> fibers);
};

// Attaches product metadata after verifying the stalk data really is of
// product shape with selection restrictions.
inline Sheaf with_product_structure(Sheaf s, std::vector<int> fibers) {
  Sheaf model = Sheaf::product(s.space(), fibers);
  check(model == s, errc::not_product_type, "stalk data is not of product shape");
  // Rebuild as the model so the fast section path applies.
  return model;
}

class SheafMorphism {
 public:
  SheafMorphism() = default;
  SheafMorphism(Sheaf source, Sheaf target, std::vector<Matrix> comps, bool validate = true)
      : source_(std::move(source)), target_(std::move(target)), comps_(std::move(comps)) {
    const FinSpace& sp = source_.space();
    check(sp == target_.space(), errc::validation, "morphism: sheaves on different spaces");
    check(int(comps_.size()) == sp.size(), errc::validation, "morphism: one matrix per point");
    for (int x = 0; x < sp.size(); ++x)
      check(comps_[x].rows() == target_.stalk_dim(x) && comps_[x].cols() == source_.stalk_dim(x),
            errc::validation, "morphism: component shape at " + sp.name(x));
    if (validate) this->validate();
  }

  static SheafMorphism zero(const Sheaf& source, const Sheaf& target) {
    std::vector<Matrix> comps;
    for (int x = 0; x < source.space().size(); ++x)
      comps.push_back(Matrix::zero(target.stalk_dim(x), source.stalk_dim(x)));
    return SheafMorphism(source, target, std::move(comps), false);
  }
  static SheafMorphism identity(const Sheaf& s) {
    std::vector<Matrix> comps;
    for (int x = 0; x < s.space().size(); ++x)
      comps.push_back(Matrix::identity(s.stalk_dim(x)));
    return SheafMorphism(s, s, std::move(comps), false);
  }

  void validate() const {
    const FinSpace& sp = source_.space();
    for (int x = 0; x < sp.size(); ++x)
      for (int y = 0; y < sp.size(); ++y)
        if (sp.leq(x, y))
          check(target_.res(x, y) * comps_[x] == comps_[y] * source_.res(x, y), errc::not_morphism,
                "morphism does not commute with restrictions " + sp.name(x) + "->" + sp.name(y));
  }

  const Sheaf& source() const { return source_; }
  const Sheaf& target() const { return target_; }
  const Matrix& comp(int x) const { return comps_[x]; }

  SheafMorphism compose_with(const SheafMorphism& first) const {
    std::vector<Matrix> comps;
    for (int x = 0; x < source_.space().size(); ++x)
      comps.push_back(comp(x) * first.comp(x));
    return SheafMorphism(first.source_, target_, std::move(comps), false);
  }
  SheafMorphism operator-() const {
    std::vector<Matrix> comps;
    for (const auto& c : comps_) comps.push_back(-c);
    return SheafMorphism(source_, target_, std::move(comps), false);
  }
  SheafMorphism operator-(const SheafMorphism& o) const {
    std::vector<Matrix> comps;
    for (int x = 0; x < source_.space().size(); ++x) comps.push_back(comp(x) - o.comp(x));
    return SheafMorphism(source_, target_, std::move(comps), false);
  }

  // Induced map on sections over an open set.
  Matrix section_map(uint64_t mask) const {
    const SectionSpace& ss = source_.sections(mask);
    const SectionSpace& ts = target_.sections(mask);
    StalkLayout ls = source_.layout(mask), lt = target_.layout(mask);
    Matrix blk(lt.total, ls.total);
    for (size_t i = 0; i < ls.points.size(); ++i)
      blk.set_block(lt.offset[i], ls.offset[i], comps_[ls.points[i]]);
    Matrix b = blk * ss.emb;
    Matrix m = ts.linv * b;
    check(ts.emb * m == b, errc::validation, "section map escapes the section space");
    return m;
  }

 private:
  Sheaf source_, target_;
  std::vector<Matrix> comps_;
};

// Pointwise kernel with induced restrictions, plus its inclusion.
struct KernelSheafData {
  Sheaf sheaf;
  SheafMorphism inclusion;
};

inline KernelSheafData kernel_sheaf(const SheafMorphism& m) {
  const FinSpace& sp = m.source().space();
  int n = sp.size();
  std::vector<Subspace> kers(n);
  std::vector<int> dims(n);
  for (int x = 0; x < n; ++x) {
    kers[x] = kernel(m.comp(x));
    dims[x] = kers[x].dim();
  }
  std::map<std::pair<int, int>, Matrix> res;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (!sp.leq(x, y)) continue;
      auto r = solve_matrix(kers[y].basis, m.source().res(x, y) * kers[x].basis);
      check(r.has_value(), errc::validation, "kernel not preserved by restrictions");
      res[{x, y}] = *r;
    }
  KernelSheafData out;
  out.sheaf = Sheaf::from_stalks(sp, dims, std::move(res), false);
  std::vector<Matrix> incl;
  for (int x = 0; x < n; ++x) incl.push_back(kers[x].basis);
  out.inclusion = SheafMorphism(out.sheaf, m.source(), std::move(incl));
  return out;
}

// Pointwise cokernel (which on a finite space is already the sheafification:
// the stalk of the sheafified presheaf at x is its value on U_x), plus the
// projection from the target.
struct CokernelSheafData {
  Sheaf sheaf;
  SheafMorphism projection;
  std::vector<Matrix> reps;  // per point: section of the projection
};

inline CokernelSheafData cokernel_sheaf(const SheafMorphism& m) {
  const FinSpace& sp = m.source().space();
  int n = sp.size();
  std::vector<QuotientData> qs(n);
  std::vector<int> dims(n);
  for (int x = 0; x < n; ++x) {
    qs[x] = quotient(Subspace::full(m.target().stalk_dim(x)), image(m.comp(x)));
    dims[x] = qs[x].dim;
  }
  std::map<std::pair<int, int>, Matrix> res;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (sp.leq(x, y)) res[{x, y}] = qs[y].projector * (m.target().res(x, y) * qs[x].reps);
  CokernelSheafData out;
  out.sheaf = Sheaf::from_stalks(sp, dims, std::move(res), false);
  std::vector<Matrix> proj;
  for (int x = 0; x < n; ++x) {
    proj.push_back(qs[x].projector);
    out.reps.push_back(qs[x].reps);
  }
  out.projection = SheafMorphism(m.target(), out.sheaf, std::move(proj));
  return out;
}

// Direct image: (f_* T)_x = T(f^{-1} U_x) in section coordinates. Product
// structure survives when grouping the fibers of f^{-1}(u) by u keeps the
// source point order; otherwise the stalks are generic section spaces.
inline Sheaf pushforward(const ContinuousMap& f, const Sheaf& t) {
  check(t.space() == f.source(), errc::validation, "pushforward: sheaf not on the source");
  const FinSpace& x = f.target();
  const FinSpace& y = f.source();
  int n = x.size();
  if (t.is_product()) {
    bool grouped_order_ok = true;
    for (int u = 0; u < n && grouped_order_ok; ++u) {
      // Points of f^{-1}U_u sorted by (f(z), z) must already be sorted by z.
      int last = -1;
      for (int uu = 0; uu < n; ++uu) {
        if (!x.leq(u, uu)) continue;
        for (int z = 0; z < y.size(); ++z) {
          if (f(z) != uu) continue;
          if (z < last) grouped_order_ok = false;
          last = z;
        }
      }
    }
    if (grouped_order_ok) {
      std::vector<int> fib(n, 0);
      for (int z = 0; z < y.size(); ++z) fib[f(z)] += t.fibers()[z];
      return Sheaf::product(x, fib);
    }
  }
  std::vector<int> dims(n);
  for (int u = 0; u < n; ++u) dims[u] = t.sections(f.preimage(x.up_mask(u))).dim;
  std::map<std::pair<int, int>, Matrix> res;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      if (x.leq(u, v))
        res[{u, v}] = t.restriction_map(f.preimage(x.up_mask(u)), f.preimage(x.up_mask(v)));
  return Sheaf::from_stalks(x, std::move(dims), std::move(res), false);
}

// Canonical iso between (f_*T)_u stalk coordinates and section coordinates of
// T over f^{-1}U_u: returns (to_stalk, from_stalk). For a product-shaped
// pushforward the stalk groups fibers by the image point, so this is a
// permutation; otherwise the stalk coordinates are the section coordinates.
inline std::pair<Matrix, Matrix> pushforward_coords(const ContinuousMap& f, const Sheaf& t,
                                                    int u) {
  const FinSpace& x = f.target();
  uint64_t pre = f.preimage(x.up_mask(u));
  const SectionSpace& s = t.sections(pre);
  Sheaf ft = pushforward(f, t);
  if (ft.is_product() && t.is_product()) {
    int dim = ft.stalk_dim(u);
    check(dim == s.dim, errc::validation, "pushforward stalk dim mismatch");
    Matrix to_stalk(dim, dim);
    int row = 0;
    for (int v = 0; v < x.size(); ++v) {
      if (!x.leq(u, v)) continue;
      for (int z = 0; z < f.source().size(); ++z) {
        if (f(z) != v) continue;
        int col = t.section_fiber_offset(pre, z);
        for (int k = 0; k < t.fibers()[z]; ++k) to_stalk(row++, col + k) = 1;
      }
    }
    return {to_stalk, to_stalk.transpose()};
  }
  return {Matrix::identity(s.dim), Matrix::identity(s.dim)};
}

inline SheafMorphism pushforward(const ContinuousMap& f, const SheafMorphism& m) {
  Sheaf fs = pushforward(f, m.source());
  Sheaf ft = pushforward(f, m.target());
  const FinSpace& x = f.target();
  std::vector<Matrix> comps;
  for (int u = 0; u < x.size(); ++u) {
    uint64_t pre = f.preimage(x.up_mask(u));
    Matrix sm = m.section_map(pre);
    comps.push_back(pushforward_coords(f, m.target(), u).first * sm *
                    pushforward_coords(f, m.source(), u).second);
  }
  return SheafMorphism(fs, ft, std::move(comps));
}

// Inverse image: (f^{-1} S)_y = S_{f(y)}.
inline Sheaf inverse_image(const ContinuousMap& f, const Sheaf& s) {
  check(s.space() == f.target(), errc::validation, "inverse_image: sheaf not on the target");
  const FinSpace& y = f.source();
  std::vector<int> dims(y.size());
  for (int i = 0; i < y.size(); ++i) dims[i] = s.stalk_dim(f(i));
  std::map<std::pair<int, int>, Matrix> res;
  for (int i = 0; i < y.size(); ++i)
    for (int j = 0; j < y.size(); ++j)
      if (y.leq(i, j)) res[{i, j}] = s.res(f(i), f(j));
  Sheaf out = Sheaf::from_stalks(y, std::move(dims), std::move(res), false);
  if (s.is_product()) {
    // Open embeddings preserve the product shape on the nose; detect by
    // comparing against the model rather than guessing.
    bool injective = true;
    std::vector<bool> hit(f.target().size(), false);
    for (int i = 0; i < y.size(); ++i) {
      if (hit[f(i)]) injective = false;
      hit[f(i)] = true;
    }
    if (injective) {
      std::vector<int> fib(y.size());
      for (int i = 0; i < y.size(); ++i) fib[i] = s.fibers()[f(i)];
      Sheaf model = Sheaf::product(y, fib);
      if (model == out) return model;
    }
  }
  return out;
}

inline SheafMorphism inverse_image(const ContinuousMap& f, const SheafMorphism& m) {
  std::vector<Matrix> comps;
  for (int i = 0; i < f.source().size(); ++i) comps.push_back(m.comp(f(i)));
  return SheafMorphism(inverse_image(f, m.source()), inverse_image(f, m.target()),
                       std::move(comps), false);
}

// Direct sum with inclusion and projection morphisms per summand. Product
// sheaves sum to a product sheaf (fibers concatenate pointwise), so the
// blocks are interleaved; the inclusions record the bookkeeping.
struct DirectSumData {
  Sheaf sum;
  std::vector<SheafMorphism> incl;
  std::vector<SheafMorphism> proj;
};

inline DirectSumData direct_sum(const std::vector<Sheaf>& parts) {
  check(!parts.empty(), errc::validation, "direct sum of nothing");
  const FinSpace& sp = parts[0].space();
  bool all_product = true;
  for (const auto& p : parts) {
    check(p.space() == sp, errc::validation, "direct sum across different spaces");
    all_product = all_product && p.is_product();
  }
  DirectSumData out;
  int n = sp.size();
  if (all_product) {
    std::vector<int> fib(n, 0);
    for (const auto& p : parts)
      for (int x = 0; x < n; ++x) fib[x] += p.fibers()[x];
    out.sum = Sheaf::product(sp, fib);
    // Fiber block of part i at point y starts after the fibers of earlier
    // parts at y.
    for (size_t i = 0; i < parts.size(); ++i) {
      std::vector<Matrix> incl(n), proj(n);
      for (int x = 0; x < n; ++x) {
        Matrix inc(out.sum.stalk_dim(x), parts[i].stalk_dim(x));
        int sum_row = 0, part_col = 0;
        for (int y = 0; y < n; ++y) {
          if (!sp.leq(x, y)) continue;
          int before = 0;
          for (size_t j = 0; j < i; ++j) before += parts[j].fibers()[y];
          for (int k = 0; k < parts[i].fibers()[y]; ++k)
            inc(sum_row + before + k, part_col + k) = 1;
          sum_row += fib[y];
          part_col += parts[i].fibers()[y];
        }
        proj[x] = inc.transpose();
        incl[x] = std::move(inc);
      }
      out.incl.emplace_back(parts[i], out.sum, std::move(incl), false);
      out.proj.emplace_back(out.sum, parts[i], std::move(proj), false);
    }
    return out;
  }
  std::vector<int> dims(n, 0);
  for (const auto& p : parts)
    for (int x = 0; x < n; ++x) dims[x] += p.stalk_dim(x);
  std::map<std::pair<int, int>, Matrix> res;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (!sp.leq(x, y)) continue;
      Matrix r(dims[y], dims[x]);
      int ro = 0, co = 0;
      for (const auto& p : parts) {
        r.set_block(ro, co, p.res(x, y));
        ro += p.stalk_dim(y);
        co += p.stalk_dim(x);
      }
      res[{x, y}] = std::move(r);
    }
  out.sum = Sheaf::from_stalks(sp, dims, std::move(res), false);
  for (size_t i = 0; i < parts.size(); ++i) {
    std::vector<Matrix> incl(n), proj(n);
    for (int x = 0; x < n; ++x) {
      Matrix inc(out.sum.stalk_dim(x), parts[i].stalk_dim(x));
      int before = 0;
      for (size_t j = 0; j < i; ++j) before += parts[j].stalk_dim(x);
      inc.set_block(before, 0, Matrix::identity(parts[i].stalk_dim(x)));
      proj[x] = inc.transpose();
      incl[x] = std::move(inc);
    }
    out.incl.emplace_back(parts[i], out.sum, std::move(incl), false);
    out.proj.emplace_back(out.sum, parts[i], std::move(proj), false);
  }
  return out;
}

// Restriction of a sheaf to an open subspace (stalks and restrictions of the
// points that survive, relative order preserved).
inline Sheaf restrict_sheaf(const Sheaf& s, const SubspaceData& sub) {
  Sheaf out = inverse_image(sub.inclusion, s);
  return out;
}

// Canonical adjunction morphisms: unit S -> f_* f^{-1} S on the target and
// counit f^{-1} f_* T -> T on the source.
inline SheafMorphism adjunction_unit(const ContinuousMap& f, const Sheaf& s) {
  Sheaf fi = inverse_image(f, s);
  Sheaf ffi = pushforward(f, fi);
  const FinSpace& x = f.target();
  std::vector<Matrix> comps;
  for (int u = 0; u < x.size(); ++u) {
    uint64_t pre = f.preimage(x.up_mask(u));
    // s_u -> tuple (r_{u -> f(z)} s)_z over the preimage, then into section
    // and stalk coordinates.
    StalkLayout l = fi.layout(pre);
    Matrix tup(l.total, s.stalk_dim(u));
    for (size_t i = 0; i < l.points.size(); ++i)
      tup.set_block(l.offset[i], 0, s.res(u, f(l.points[i])));
    const SectionSpace& sec = fi.sections(pre);
    Matrix m = sec.linv * tup;
    check(sec.emb * m == tup, errc::validation, "unit image is not a section");
    comps.push_back(pushforward_coords(f, fi, u).first * m);
  }
  return SheafMorphism(s, ffi, std::move(comps));
}

inline SheafMorphism adjunction_counit(const ContinuousMap& f, const Sheaf& t) {
  Sheaf ft = pushforward(f, t);
  Sheaf fft = inverse_image(f, ft);
  const FinSpace& y = f.source();
  std::vector<Matrix> comps;
  for (int z = 0; z < y.size(); ++z) {
    int u = f(z);
    uint64_t pre = f.preimage(f.target().up_mask(u));
    const SectionSpace& sec = t.sections(pre);
    // Evaluate the section at the point z.
    StalkLayout l = t.layout(pre);
    Matrix ev(t.stalk_dim(z), l.total);
    for (size_t i = 0; i < l.points.size(); ++i)
      if (l.points[i] == z) ev.set_block(0, l.offset[i], Matrix::identity(t.stalk_dim(z)));
    comps.push_back(ev * sec.emb * pushforward_coords(f, t, u).second);
  }
  return SheafMorphism(fft, t, std::move(comps));
}

// Bounded complex of sheaves concentrated in degrees [0, qmax].
class SheafComplex {
 public:
  SheafComplex() = default;
  SheafComplex(std::vector<Sheaf> terms, std::vector<SheafMorphism> diff, bool validate = true)
      : terms_(std::move(terms)), diff_(std::move(diff)) {
    check(!terms_.empty(), errc::validation, "sheaf complex needs at least one term");
    check(diff_.size() + 1 == terms_.size() || (terms_.size() == 1 && diff_.empty()),
          errc::validation, "sheaf complex: one differential between consecutive terms");
    if (validate) {
      for (size_t i = 0; i < diff_.size(); ++i) {
        check(diff_[i].source() == terms_[i] && diff_[i].target() == terms_[i + 1],
              errc::validation, "sheaf complex: differential endpoints");
        diff_[i].validate();
      }
      for (size_t i = 0; i + 1 < diff_.size(); ++i)
        for (int x = 0; x < space().size(); ++x)
          check((diff_[i + 1].comp(x) * diff_[i].comp(x)).is_zero(), errc::validation,
                "sheaf complex: d∘d != 0 at " + space().name(x));
    }
  }

  static SheafComplex single(Sheaf s) { return SheafComplex({std::move(s)}, {}); }

  const FinSpace& space() const { return terms_[0].space(); }
  int qmax() const { return int(terms_.size()) - 1; }
  const Sheaf& term(int q) const {
    check(0 <= q && q <= qmax(), errc::validation, "sheaf complex degree out of range");
    return terms_[q];
  }
  bool has_term(int q) const { return 0 <= q && q <= qmax(); }
  const SheafMorphism& diff(int q) const {
    check(0 <= q && q < int(diff_.size()), errc::validation, "sheaf complex diff out of range");
    return diff_[q];
  }

  // Sections over an open set, as a complex in degrees [0, qmax].
  Complex section_complex(uint64_t mask) const {
    std::vector<int> dims;
    std::vector<Matrix> d;
    for (int q = 0; q <= qmax(); ++q) dims.push_back(terms_[q].sections(mask).dim);
    for (int q = 0; q <= qmax(); ++q)
      d.push_back(q < qmax() ? diff_[q].section_map(mask) : Matrix::zero(0, dims[q]));
    return Complex(0, std::move(dims), std::move(d));
  }

  // Restriction of sections as a chain map between section complexes.
  ChainMap restriction_chain_map(uint64_t u, uint64_t v) const {
    Complex cu = section_complex(u), cv = section_complex(v);
    std::vector<Matrix> comps;
    for (int q = 0; q <= qmax(); ++q) comps.push_back(terms_[q].restriction_map(u, v));
    return ChainMap(cu, cv, 0, std::move(comps));
  }

  // Stalk complex at a point.
  Complex stalk_complex(int x) const {
    std::vector<int> dims;
    std::vector<Matrix> d;
    for (int q = 0; q <= qmax(); ++q) dims.push_back(terms_[q].stalk_dim(x));
    for (int q = 0; q <= qmax(); ++q)
      d.push_back(q < qmax() ? diff_[q].comp(x) : Matrix::zero(0, dims[q]));
    return Complex(0, std::move(dims), std::move(d));
  }

 private:
  std::vector<Sheaf> terms_;
  std::vector<SheafMorphism> diff_;
};

// Morphism of sheaf complexes given pointwise per degree.
class SheafComplexMap {
 public:
  SheafComplexMap() = default;
  SheafComplexMap(SheafComplex source, SheafComplex target, std::vector<SheafMorphism> comps)
      : source_(std::move(source)), target_(std::move(target)), comps_(std::move(comps)) {
    check(source_.qmax() <= target_.qmax(), errc::validation,
          "sheaf complex map: source may not extend beyond the target");
    check(int(comps_.size()) == source_.qmax() + 1, errc::validation,
          "sheaf complex map: one component per source degree");
    for (int q = 0; q <= source_.qmax(); ++q)
      for (int x = 0; x < source_.space().size(); ++x) {
        // At the top source degree the target differential must kill the
        // image, since the next component is zero.
        Matrix lhs = q < target_.qmax() ? target_.diff(q).comp(x) * comps_[q].comp(x)
                                        : Matrix::zero(0, 0);
        if (q < target_.qmax()) {
          Matrix rhs = q < source_.qmax()
                           ? comps_[q + 1].comp(x) * source_.diff(q).comp(x)
                           : Matrix::zero(lhs.rows(), lhs.cols());
          check(lhs == rhs, errc::not_morphism,
                "sheaf complex map does not commute with d at " + source_.space().name(x));
        }
      }
  }

  const SheafComplex& source() const { return source_; }
  const SheafComplex& target() const { return target_; }
  const SheafMorphism& comp(int q) const { return comps_[q]; }

  ChainMap section_chain_map(uint64_t mask) const {
    Complex cs = source_.section_complex(mask);
    Complex ct = target_.section_complex(mask);
    std::vector<Matrix> comps;
    for (int q = 0; q <= source_.qmax(); ++q) comps.push_back(comps_[q].section_map(mask));
    return ChainMap(cs, ct, 0, std::move(comps));
  }

 private:
  SheafComplex source_, target_;
  std::vector<SheafMorphism> comps_;
};

// Relative sections F(U, U') = ker(F(U) -> F(U')) of each term, as a complex
// in its own canonical coordinates together with the embeddings into section
// coordinates over U.
struct RelativeSectionComplex {
  Complex complex;
  std::vector<Matrix> emb;   // per degree: sections(U)-coords x rel-dim
  std::vector<Matrix> linv;  // left inverses
};

inline RelativeSectionComplex relative_section_complex(const SheafComplex& k, uint64_t u,
                                                       uint64_t v) {
  RelativeSectionComplex out;
  std::vector<int> dims;
  std::vector<Subspace> rel;
  for (int q = 0; q <= k.qmax(); ++q) {
    Subspace ker = kernel(k.term(q).restriction_map(u, v));
    dims.push_back(ker.dim());
    rel.push_back(ker);
  }
  std::vector<Matrix> d;
  for (int q = 0; q <= k.qmax(); ++q) {
    out.emb.push_back(rel[q].basis);
    out.linv.push_back(rel[q].dim() > 0 ? left_inverse(rel[q].basis)
                                        : Matrix(0, rel[q].ambient));
  }
  for (int q = 0; q <= k.qmax(); ++q) {
    if (q == k.qmax()) {
      d.push_back(Matrix::zero(0, dims[q]));
      continue;
    }
    Matrix full = k.diff(q).section_map(u);
    Matrix restricted = out.linv[q + 1] * (full * out.emb[q]);
    check(out.emb[q + 1] * restricted == full * out.emb[q], errc::validation,
          "differential does not preserve relative sections");
    d.push_back(std::move(restricted));
  }
  out.complex = Complex(0, std::move(dims), std::move(d));
  return out;
}

// S(A, A'): sections over A vanishing on A', as a subspace of sections(A).
inline Subspace relative_sections(const Sheaf& f, const OpenSet& u, const OpenSet& u_prime) {
  check(u.space == f.space() && u_prime.space == f.space(), errc::validation,
        "relative sections: wrong space");
  check(u.contains(u_prime), errc::containment, "relative sections: U' not inside U");
  return kernel(f.restriction_map(u.mask, u_prime.mask));
}

}  // namespace relsheaf
