#pragma once

#include <optional>
#include <vector>

#include "selsig/rational.hpp"
#include "selsig/rng.hpp"

namespace selsig {

// Integral binary cubic forms a x^3 + b x^2 y + c x y^2 + d y^3: Hessian,
// discriminant, the reduced class representative, irreducibility,
// maximality of the associated cubic ring at a prime, sampling, and a
// complete small-discriminant scan.

struct CubicForm {
  long long a = 0, b = 0, c = 0, d = 0;
  bool operator==(const CubicForm&) const = default;
  auto operator<=>(const CubicForm&) const = default;
};

struct HessianForm {
  long long P = 0, Q = 0, R = 0;  // P = b^2-3ac, Q = bc-9ad, R = c^2-3bd
};

long long disc_cubic(const CubicForm& f);
HessianForm hessian(const CubicForm& f);

// coefficients in descending degree order, leading coefficient nonzero
Int poly_disc(const std::vector<Int>& coeffs);

// the right substitution action f -> f((x,y) M) / det M
CubicForm transform(const CubicForm& f, long long m00, long long m01, long long m10,
                    long long m11);

// Hessian-reduced plus the four tie-break conditions; real forms only
bool is_reduced(const CubicForm& f);

// the unique reduced representative of the class of f (disc > 0,
// irreducible)
CubicForm reduce(const CubicForm& f);

bool is_irreducible(const CubicForm& f);

// Davenport-Heilbronn: the ring of f fails to be maximal at p iff p divides
// the form or f mod p has a repeated root theta with f(lift theta) = 0 mod
// p^2 (lift-independent because the gradient vanishes at a repeated root)
bool is_maximal_at(const CubicForm& f, long long p);
bool is_maximal(const CubicForm& f);

struct FormClassRecord {
  CubicForm reduced_form;
  long long disc = 0;
  bool maximal = false;
  bool irreducible = false;
  bool real = false;  // disc > 0
};

// one uniform draw a,b in [0,X], c,d in [-X,X]; kept iff real, irreducible,
// reduced and maximal
std::optional<FormClassRecord> sample_form(long long height, Rng& rng);

// the complete duplicate-free list of reduced irreducible maximal forms
// with 0 < disc <= bound, sorted by (disc, coefficients)
std::vector<FormClassRecord> scan(long long bound);

}  // namespace selsig
