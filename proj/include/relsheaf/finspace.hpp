#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "relsheaf/error.hpp"

namespace relsheaf {

// Finite T0 space as its specialization poset: x <= y iff every open set
// containing x contains y. Open sets are up-sets; the minimal open set of x
// is U_x = {y : x <= y}. Points are indexed 0..n-1; subsets are bitmasks.
class FinSpace {
 public:
  FinSpace() : d_(std::make_shared<Data>()) {}

  // From Hasse edges (x, y) meaning x <= y; reflexive-transitive closure is
  // taken and antisymmetry checked.
  static FinSpace from_hasse(std::vector<std::string> names,
                             const std::vector<std::pair<int, int>>& edges) {
    auto d = std::make_shared<Data>();
    d->names = std::move(names);
    int n = int(d->names.size());
    check(n <= 60, errc::validation, "spaces are limited to 60 points");
    d->up.assign(n, 0);
    for (int i = 0; i < n; ++i) d->up[i] = uint64_t(1) << i;
    for (auto [x, y] : edges) {
      check(0 <= x && x < n && 0 <= y && y < n, errc::validation, "hasse edge out of range");
      d->up[x] |= uint64_t(1) << y;
    }
    // Transitive closure.
    for (bool changed = true; changed;) {
      changed = false;
      for (int x = 0; x < n; ++x) {
        uint64_t m = d->up[x];
        uint64_t grown = m;
        for (int y = 0; y < n; ++y)
          if (m >> y & 1) grown |= d->up[y];
        if (grown != m) {
          d->up[x] = grown;
          changed = true;
        }
      }
    }
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        check(!(x != y && (d->up[x] >> y & 1) && (d->up[y] >> x & 1)), errc::validation,
              "order not antisymmetric: " + d->names[x] + " and " + d->names[y]);
    d->finish();
    return FinSpace(std::move(d));
  }

  static FinSpace from_order(std::vector<std::string> names, std::vector<uint64_t> up_masks) {
    auto d = std::make_shared<Data>();
    d->names = std::move(names);
    d->up = std::move(up_masks);
    int n = int(d->names.size());
    check(int(d->up.size()) == n, errc::validation, "order table size mismatch");
    for (int x = 0; x < n; ++x) {
      check(d->up[x] >> x & 1, errc::validation, "order not reflexive");
      for (int y = 0; y < n; ++y) {
        if (!(d->up[x] >> y & 1)) continue;
        check((d->up[x] | d->up[y]) == d->up[x], errc::validation, "order not transitive");
        check(!(x != y && (d->up[y] >> x & 1)), errc::validation, "order not antisymmetric");
      }
    }
    d->finish();
    return FinSpace(std::move(d));
  }

  static FinSpace point() { return from_hasse({"pt"}, {}); }

  int size() const { return int(d_->names.size()); }
  const std::string& name(int i) const { return d_->names[i]; }
  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (d_->names[i] == name) return i;
    fail(errc::validation, "unknown point '" + name + "'");
  }

  bool leq(int x, int y) const { return d_->up[x] >> y & 1; }
  uint64_t up_mask(int x) const { return d_->up[x]; }  // U_x
  uint64_t full_mask() const { return size() == 0 ? 0 : (~uint64_t(0) >> (64 - size())); }

  bool is_upset(uint64_t m) const {
    for (int x = 0; x < size(); ++x)
      if ((m >> x & 1) && (d_->up[x] & ~m)) return false;
    return true;
  }
  bool is_downset(uint64_t m) const { return is_upset(full_mask() & ~m); }

  // Hasse edges (x covered-by y) of the subposet induced on an up-set.
  std::vector<std::pair<int, int>> hasse_edges(uint64_t within) const {
    std::vector<std::pair<int, int>> edges;
    for (int x = 0; x < size(); ++x) {
      if (!(within >> x & 1)) continue;
      for (int y = 0; y < size(); ++y) {
        if (x == y || !(within >> y & 1) || !leq(x, y)) continue;
        bool covering = true;
        for (int z = 0; z < size() && covering; ++z)
          if (z != x && z != y && (within >> z & 1) && leq(x, z) && leq(z, y)) covering = false;
        if (covering) edges.emplace_back(x, y);
      }
    }
    return edges;
  }

  std::vector<uint64_t> all_upsets() const {
    check(size() <= 16, errc::validation, "up-set enumeration limited to 16 points");
    std::vector<uint64_t> out;
    uint64_t full = full_mask();
    for (uint64_t m = 0;; ++m) {
      if (is_upset(m)) out.push_back(m);
      if (m == full) break;
    }
    return out;
  }

  // Length (in edges) of the longest chain.
  int height() const {
    std::vector<int> h(size(), 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (int x = 0; x < size(); ++x)
        for (int y = 0; y < size(); ++y)
          if (x != y && leq(x, y) && h[x] < h[y] + 1) {
            h[x] = h[y] + 1;
            changed = true;
          }
    }
    int m = 0;
    for (int v : h) m = std::max(m, v);
    return m;
  }

  bool operator==(const FinSpace& o) const {
    return d_ == o.d_ || (d_->names == o.d_->names && d_->up == o.d_->up);
  }
  bool operator!=(const FinSpace& o) const { return !(*this == o); }

 private:
  struct Data {
    std::vector<std::string> names;
    std::vector<uint64_t> up;
    void finish() {}
  };
  explicit FinSpace(std::shared_ptr<Data> d) : d_(std::move(d)) {}
  std::shared_ptr<Data> d_;
};

struct OpenSet {
  FinSpace space;
  uint64_t mask = 0;

  OpenSet() = default;
  OpenSet(FinSpace sp, uint64_t m) : space(std::move(sp)), mask(m) {
    check(space.is_upset(mask), errc::validation, "subset is not open (not an up-set)");
  }
  static OpenSet whole(const FinSpace& sp) { return OpenSet(sp, sp.full_mask()); }
  static OpenSet empty(const FinSpace& sp) { return OpenSet(sp, 0); }

  bool contains(const OpenSet& o) const { return (o.mask & ~mask) == 0; }
  bool operator==(const OpenSet& o) const { return space == o.space && mask == o.mask; }
};

// Continuous = order preserving for finite T0 spaces.
class ContinuousMap {
 public:
  ContinuousMap() = default;
  ContinuousMap(FinSpace source, FinSpace target, std::vector<int> point_map)
      : source_(std::move(source)), target_(std::move(target)), map_(std::move(point_map)) {
    check(int(map_.size()) == source_.size(), errc::validation, "point map size mismatch");
    for (int y = 0; y < source_.size(); ++y)
      check(0 <= map_[y] && map_[y] < target_.size(), errc::validation, "point map out of range");
    for (int y = 0; y < source_.size(); ++y)
      for (int y2 = 0; y2 < source_.size(); ++y2)
        check(!source_.leq(y, y2) || target_.leq(map_[y], map_[y2]), errc::not_continuous,
              "map is not order preserving at " + source_.name(y));
  }

  static ContinuousMap identity(const FinSpace& sp) {
    std::vector<int> m(sp.size());
    for (int i = 0; i < sp.size(); ++i) m[i] = i;
    return ContinuousMap(sp, sp, std::move(m));
  }

  const FinSpace& source() const { return source_; }
  const FinSpace& target() const { return target_; }
  int operator()(int y) const { return map_[y]; }

  uint64_t preimage(uint64_t target_mask) const {
    uint64_t m = 0;
    for (int y = 0; y < source_.size(); ++y)
      if (target_mask >> map_[y] & 1) m |= uint64_t(1) << y;
    return m;
  }
  OpenSet preimage(const OpenSet& u) const {
    check(u.space == target_, errc::validation, "preimage: open set on wrong space");
    return OpenSet(source_, preimage(u.mask));
  }

  ContinuousMap compose_with(const ContinuousMap& first) const {
    check(first.target_ == source_, errc::validation, "compose: middle spaces differ");
    std::vector<int> m(first.source_.size());
    for (int i = 0; i < first.source_.size(); ++i) m[i] = map_[first.map_[i]];
    return ContinuousMap(first.source_, target_, std::move(m));
  }

 private:
  FinSpace source_, target_;
  std::vector<int> map_;
};

// Open subspace with the induced order; points keep their relative order.
// sub_to_parent[i] is the parent index of subspace point i.
struct SubspaceData {
  FinSpace space;
  std::vector<int> sub_to_parent;
  std::vector<int> parent_to_sub;  // -1 outside
  ContinuousMap inclusion;
};

inline SubspaceData open_subspace(const FinSpace& parent, uint64_t mask) {
  check(parent.is_upset(mask), errc::validation, "open_subspace: not an up-set");
  SubspaceData out;
  out.parent_to_sub.assign(parent.size(), -1);
  for (int x = 0; x < parent.size(); ++x)
    if (mask >> x & 1) {
      out.parent_to_sub[x] = int(out.sub_to_parent.size());
      out.sub_to_parent.push_back(x);
    }
  int n = int(out.sub_to_parent.size());
  std::vector<std::string> names(n);
  std::vector<uint64_t> up(n, 0);
  for (int i = 0; i < n; ++i) {
    names[i] = parent.name(out.sub_to_parent[i]);
    for (int j = 0; j < n; ++j)
      if (parent.leq(out.sub_to_parent[i], out.sub_to_parent[j])) up[i] |= uint64_t(1) << j;
  }
  out.space = FinSpace::from_order(std::move(names), std::move(up));
  out.inclusion = ContinuousMap(out.space, parent, out.sub_to_parent);
  return out;
}

}  // namespace relsheaf
