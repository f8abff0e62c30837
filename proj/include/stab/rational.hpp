// Core exact-arithmetic types shared by the whole library.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace stab {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;
using QVec = std::vector<Rat>;

// Thrown on malformed user input (dimension mismatches, bad block specs, ...).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a point claimed to lie in a set does not.
struct NotInSetError : std::runtime_error {
    explicit NotInSetError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown by the problem-file parser; carries a line number.
struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what), line(line_) {}
};

// Internal invariant violations (certificate re-check failures and the like).
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

inline double to_double(const Rat& r) { return static_cast<double>(r); }

// Exact conversion: every finite double is a rational.
Rat rat_of_double(double x);

// Parse "p", "-p/q", "3.25" (decimal) into a rational. Throws InputError.
Rat parse_rat(const std::string& s);

std::string rat_str(const Rat& r);
std::string vec_str(const QVec& v);

// ---- small vector helpers --------------------------------------------------

inline Rat dot(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw InputError("dot: size mismatch");
    Rat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool is_zero_vec(const QVec& v) {
    for (const auto& x : v)
        if (x != 0) return false;
    return true;
}

QVec vadd(const QVec& a, const QVec& b);
QVec vsub(const QVec& a, const QVec& b);
QVec vscale(const Rat& c, const QVec& a);
QVec vneg(const QVec& a);

// Scale a nonzero rational vector to coprime integers, keeping direction.
// Zero vector is returned unchanged.
QVec canonical_ray(const QVec& v);

// True if b == c*a for some c > 0.
bool positively_proportional(const QVec& a, const QVec& b);

// ---- dense rational matrix ---------------------------------------------------

struct QMat {
    int rows = 0, cols = 0;
    std::vector<Rat> a;  // row-major

    QMat() = default;
    QMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, Rat(0)) {}

    Rat& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const Rat& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static QMat identity(int n);
    QMat transpose() const;
    QVec mul(const QVec& x) const;   // A x
    QVec tmul(const QVec& y) const;  // A^T y
    QVec row(int i) const;
    void append_row(const QVec& r);
    bool is_zero() const;
    bool is_symmetric() const;
    bool operator==(const QMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

QMat mat_add(const QMat& A, const QMat& B);
QMat mat_scale(const Rat& c, const QMat& A);
QMat mat_mul(const QMat& A, const QMat& B);

}  // namespace stab
