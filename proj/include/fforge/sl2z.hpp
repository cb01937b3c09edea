#ifndef FFORGE_SL2Z_HPP
#define FFORGE_SL2Z_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fforge/checked_int.hpp"
#include "fforge/errors.hpp"

namespace fforge::sl2z {

// Element of SL(2,Z), row-major [[a,b],[c,d]].  det == 1 is enforced at
// construction and every operation is overflow-checked, so a value of this
// type is always an honest group element.
struct Sl2Matrix {
    std::int64_t a, b, c, d;

    Sl2Matrix(std::int64_t a_, std::int64_t b_, std::int64_t c_, std::int64_t d_)
        : a(a_), b(b_), c(c_), d(d_) {
        if (det_raw() != 1) throw DomainError("Sl2Matrix requires determinant exactly 1");
    }

    static Sl2Matrix identity() { return Sl2Matrix(1, 0, 0, 1); }

    std::int64_t trace() const { return checked_add(a, d); }

    Sl2Matrix operator*(const Sl2Matrix& o) const {
        return Sl2Matrix(checked_add(checked_mul(a, o.a), checked_mul(b, o.c)),
                         checked_add(checked_mul(a, o.b), checked_mul(b, o.d)),
                         checked_add(checked_mul(c, o.a), checked_mul(d, o.c)),
                         checked_add(checked_mul(c, o.b), checked_mul(d, o.d)));
    }

    Sl2Matrix inverse() const { return Sl2Matrix(d, checked_neg(b), checked_neg(c), a); }
    Sl2Matrix negated() const {
        return Sl2Matrix(checked_neg(a), checked_neg(b), checked_neg(c), checked_neg(d));
    }

    bool operator==(const Sl2Matrix& o) const {
        return a == o.a && b == o.b && c == o.c && d == o.d;
    }
    bool operator!=(const Sl2Matrix& o) const { return !(*this == o); }

    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
    bool is_minus_identity() const { return a == -1 && b == 0 && c == 0 && d == -1; }

    std::string str() const;

  private:
    std::int64_t det_raw() const {
        return checked_sub(checked_mul(a, d), checked_mul(b, c));
    }
};

inline const Sl2Matrix kR{1, 1, 0, 1};
inline const Sl2Matrix kL{1, 0, 1, 1};
inline const Sl2Matrix kS{0, -1, 1, 0};

enum class SingularityKind { SimpleElliptic, Cusp, Other };

struct SingularityClass {
    SingularityKind kind;
    std::int64_t p, q, r;
    Rational reciprocalSum;
};

enum class ConjugacyKind { Hyperbolic, Unipotent, FiniteOrder, NegativeTrace };

struct ConjugacyType {
    ConjugacyKind kind;
    std::int64_t trace;
};

struct TraceIdentity {
    std::int64_t traceComputed;
    Rational traceFormula;
    bool equal;
};

// Word normal form for a hyperbolic matrix with trace >= 3, together with the
// exact change of basis realizing it: conjugator * eval(word) * conjugator^-1 == M.
struct RlWord {
    std::string word;       // letters 'R' and 'L', R-block first
    Sl2Matrix conjugator;
};

struct ConjugacyResult {
    bool conjugate = false;
    std::optional<Sl2Matrix> witness;  // P with P*M1*P^-1 == M2, verified exactly
};

struct TopologicalInvariants {
    std::int64_t mu;
    std::int64_t chiFiber;
    std::int64_t chiGlued;
    std::optional<std::int64_t> eulerNumberIfNil;
};

Sl2Matrix monodromy_matrix(std::int64_t p, std::int64_t q, std::int64_t r);
TraceIdentity trace_identity_check(std::int64_t p, std::int64_t q, std::int64_t r);
SingularityClass classify_singularity(std::int64_t p, std::int64_t q, std::int64_t r);
ConjugacyType conjugacy_type(const Sl2Matrix& m);

// Product of the letters of `word` ('R'/'L').
Sl2Matrix word_matrix(const std::string& word);

// Lexicographically least cyclic rotation; the class invariant two words are
// compared by.
std::string canonical_rotation(const std::string& word);

RlWord rl_word(const Sl2Matrix& m);

// Invariant n of a trace-2 matrix M != I: the unique integer with
// M conjugate to [[1,0],[n,1]] in SL(2,Z).
std::int64_t unipotent_invariant(const Sl2Matrix& m);

ConjugacyResult are_conjugate(const Sl2Matrix& m1, const Sl2Matrix& m2);

std::optional<Sl2Matrix> brute_force_conjugator(const Sl2Matrix& m1, const Sl2Matrix& m2,
                                                std::int64_t bound);

TopologicalInvariants topological_invariants(std::int64_t p, std::int64_t q, std::int64_t r);

}  // namespace fforge::sl2z

#endif  // FFORGE_SL2Z_HPP
