#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kcell/complex.hpp"

namespace kcell {

/// P → X with P a complex of free kG-modules, exact in cone degrees <= valid_through.
struct FreeResolution {
  GComplex base;
  GComplex complex;
  ComplexMap augmentation;
  std::vector<std::size_t> ranks;  // kG-ranks of P_lo, P_lo+1, ...
  int valid_through = 0;
  std::string kind;                // "kernel-cover" or "bar"

  /// kG-rank of P_n.
  std::size_t rank(int n) const;
  /// Recomputes the cone of the augmentation and checks it is acyclic through valid_through.
  bool verify() const;
};

/// Kernel-covering resolution of m (placed in degree 0) through stage `depth`.
/// Generators are chosen greedily: a new free generator is added only when the
/// next homology class of the cone is not already in the kG-span of earlier ones.
FreeResolution free_resolution(const GModule& m, int depth);
/// Semi-free resolution of a bounded complex through degree `top`.
FreeResolution free_resolution(const GComplex& x, int top);

constexpr std::size_t kBarCap = 1000000;
/// Normalized-free bar resolution kG ⊗ kG^{⊗n} ⊗ m; m must have no relations.
FreeResolution bar_resolution(const GModule& m, int depth, std::size_t cap = kBarCap);

struct RangeReport {
  int a = 0, b = 0;
  int required = 0;    // resolution stage needed to certify the whole range
  int available = 0;   // stage the resolution was built through
  std::string resolution;
  bool certified() const { return available >= required; }
  std::string describe() const;
};

struct GradedGroups {
  int a = 0, b = -1;
  std::vector<FgAbelianGroup> groups;  // groups[i - a]
  RangeReport report;

  const FgAbelianGroup& at(int i) const { return groups[static_cast<std::size_t>(i - a)]; }
  bool all_zero() const;
  /// Number of cyclic summands per degree (the dimension over a field).
  std::vector<std::size_t> dims() const;
  std::string describe() const;
};

enum class ResolutionKind { KernelCover, Bar };

/// Hom_{kG}(P, Y) as a complex of abelian groups, in degrees [nlo, nhi];
/// degree-n maps raise degree by n and D φ = d φ − (−1)^n φ d.
GComplex hom_complex(const GComplex& p, const GComplex& y, int nlo, int nhi);
/// P ⊗_{kG} Y with P made a right module through g ↦ g^{-1}, degrees [nlo, nhi].
GComplex tensor_complex(const GComplex& p, const GComplex& y, int nlo, int nhi);

/// Ext^i(m, y) = H_{−i} Hom(P, y) for a ≤ i ≤ b.
GradedGroups ext_range(const GModule& m, const GComplex& y, int a, int b,
                       ResolutionKind kind = ResolutionKind::KernelCover);
GradedGroups ext_range(const GModule& m, const GModule& y, int a, int b,
                       ResolutionKind kind = ResolutionKind::KernelCover);
GradedGroups ext_range(const GComplex& x, const GComplex& y, int a, int b);
GradedGroups ext_from_resolution(const FreeResolution& res, const GComplex& y, int a, int b);

/// Hom(P, f) for f : Y → Y'.
ComplexMap hom_induced(const GComplex& p, const ComplexMap& f, int nlo, int nhi);

/// Maps induced on Ext^i(−, Y) → Ext^i(−, Y') in the generators of the homology presentations.
struct InducedExt {
  int a = 0, b = -1;
  std::vector<GModule> source, target;  // Ext^i as presented abelian groups
  std::vector<Matrix> maps;
  bool nilpotent_at(int i) const;
};
InducedExt ext_induced(const FreeResolution& res, const ComplexMap& f, int a, int b);

GradedGroups tor_range(const GModule& m, const GComplex& y, int a, int b,
                       ResolutionKind kind = ResolutionKind::KernelCover);
GradedGroups tor_range(const GModule& m, const GModule& y, int a, int b,
                       ResolutionKind kind = ResolutionKind::KernelCover);
GradedGroups tor_from_resolution(const FreeResolution& res, const GComplex& y, int a, int b);

/// H^n of the Borel construction: Ext^n_{kG}(k, x) with x a cochain complex (degrees <= 0).
GradedGroups borel_cochains(const GComplex& x, int a, int b);

struct OrbitCochains {
  GradedGroups groups;           // Ext^*_{kH}(k, x restricted to H)
  bool order_invertible = false;
  GradedGroups fixed;            // H^n of the strict fixed points x^H, when order_invertible
  bool agrees_with_fixed = false;
};
OrbitCochains homotopy_orbit_cochains(const GComplex& x, const Subgroup& h, int a, int b);

struct NullReport {
  bool null = false;
  GradedGroups ext;              // Ext^i(k, x) over the range
};
NullReport is_k_null_in_range(const GComplex& x, int a, int b);
NullReport is_k_equivalence_in_range(const ComplexMap& f, int a, int b);

}  // namespace kcell
