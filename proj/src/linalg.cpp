#include "stab/linalg.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>
#include <sstream>

namespace stab {

// ---- rational.hpp implementations -----------------------------------------

Rat rat_of_double(double x) {
    if (!std::isfinite(x)) throw InputError("rat_of_double: non-finite value");
    return Rat(x);
}

Rat parse_rat(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw InputError("parse_rat: empty string");
    auto slash = t.find('/');
    try {
        if (slash != std::string::npos) {
            Int num(t.substr(0, slash));
            Int den(t.substr(slash + 1));
            if (den == 0) throw InputError("parse_rat: zero denominator in '" + s + "'");
            return Rat(num, den);
        }
        auto dot_pos = t.find('.');
        if (dot_pos == std::string::npos) return Rat(Int(t));
        // decimal literal: sign, integer part, fractional part
        std::string ip = t.substr(0, dot_pos), fp = t.substr(dot_pos + 1);
        bool neg = !ip.empty() && ip[0] == '-';
        if (!ip.empty() && (ip[0] == '-' || ip[0] == '+')) ip = ip.substr(1);
        if (ip.empty()) ip = "0";
        if (fp.empty()) fp = "0";
        Int den = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
        Rat val = Rat(Int(ip)) + Rat(Int(fp), den);
        return neg ? -val : val;
    } catch (const std::exception& e) {
        throw InputError("parse_rat: cannot parse '" + s + "'");
    }
}

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::string vec_str(const QVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += rat_str(v[i]);
    }
    return s + ")";
}

QVec vadd(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw InputError("vadd: size mismatch");
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

QVec vsub(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw InputError("vsub: size mismatch");
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

QVec vscale(const Rat& c, const QVec& a) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

QVec vneg(const QVec& a) { return vscale(Rat(-1), a); }

QVec canonical_ray(const QVec& v) {
    using boost::multiprecision::gcd;
    Int num_gcd = 0, den_lcm = 1;
    for (const auto& x : v) {
        if (x == 0) continue;
        Int n = boost::multiprecision::abs(numerator(x)), d = denominator(x);
        num_gcd = num_gcd == 0 ? n : gcd(num_gcd, n);
        den_lcm = den_lcm / gcd(den_lcm, d) * d;
    }
    if (num_gcd == 0) return v;
    Rat scale = Rat(den_lcm, num_gcd);
    return vscale(scale, v);
}

bool positively_proportional(const QVec& a, const QVec& b) {
    if (a.size() != b.size() || is_zero_vec(a) || is_zero_vec(b)) return false;
    Rat c = 0;  // b = c a
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) {
            if (b[i] != 0) return false;
            continue;
        }
        Rat ci = b[i] / a[i];
        if (c == 0)
            c = ci;
        else if (ci != c)
            return false;
    }
    return c > 0;
}

QMat QMat::identity(int n) {
    QMat I(n, n);
    for (int i = 0; i < n; ++i) I.at(i, i) = 1;
    return I;
}

QMat QMat::transpose() const {
    QMat T(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) T.at(j, i) = at(i, j);
    return T;
}

QVec QMat::mul(const QVec& x) const {
    if (static_cast<int>(x.size()) != cols) throw InputError("QMat::mul: size mismatch");
    QVec r(rows, Rat(0));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (at(i, j) != 0) r[i] += at(i, j) * x[j];
    return r;
}

QVec QMat::tmul(const QVec& y) const {
    if (static_cast<int>(y.size()) != rows) throw InputError("QMat::tmul: size mismatch");
    QVec r(cols, Rat(0));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (at(i, j) != 0) r[j] += at(i, j) * y[i];
    return r;
}

QVec QMat::row(int i) const {
    QVec r(cols);
    for (int j = 0; j < cols; ++j) r[j] = at(i, j);
    return r;
}

void QMat::append_row(const QVec& r) {
    if (rows == 0 && cols == 0) cols = static_cast<int>(r.size());
    if (static_cast<int>(r.size()) != cols) throw InputError("append_row: size mismatch");
    a.insert(a.end(), r.begin(), r.end());
    ++rows;
}

bool QMat::is_zero() const {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

bool QMat::is_symmetric() const {
    if (rows != cols) return false;
    for (int i = 0; i < rows; ++i)
        for (int j = i + 1; j < cols; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

QMat mat_add(const QMat& A, const QMat& B) {
    if (A.rows != B.rows || A.cols != B.cols) throw InputError("mat_add: shape mismatch");
    QMat C(A.rows, A.cols);
    for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = A.a[i] + B.a[i];
    return C;
}

QMat mat_scale(const Rat& c, const QMat& A) {
    QMat C(A.rows, A.cols);
    for (std::size_t i = 0; i < A.a.size(); ++i) C.a[i] = c * A.a[i];
    return C;
}

QMat mat_mul(const QMat& A, const QMat& B) {
    if (A.cols != B.rows) throw InputError("mat_mul: shape mismatch");
    QMat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            if (A.at(i, k) == 0) continue;
            for (int j = 0; j < B.cols; ++j) C.at(i, j) += A.at(i, k) * B.at(k, j);
        }
    return C;
}

// ---- row reduction ----------------------------------------------------------

std::vector<int> rref(QMat& A) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < A.cols && r < A.rows; ++c) {
        int p = -1;
        for (int i = r; i < A.rows; ++i)
            if (A.at(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < A.cols; ++j) std::swap(A.at(p, j), A.at(r, j));
        Rat piv = A.at(r, c);
        for (int j = 0; j < A.cols; ++j) A.at(r, j) /= piv;
        for (int i = 0; i < A.rows; ++i) {
            if (i == r || A.at(i, c) == 0) continue;
            Rat f = A.at(i, c);
            for (int j = 0; j < A.cols; ++j) A.at(i, j) -= f * A.at(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

int rank(QMat A) { return static_cast<int>(rref(A).size()); }

std::vector<QVec> kernel_basis(const QMat& A_in) {
    QMat A = A_in;
    if (A.rows == 0) {
        std::vector<QVec> basis;
        for (int j = 0; j < A_in.cols; ++j) {
            QVec e(A_in.cols, Rat(0));
            e[j] = 1;
            basis.push_back(e);
        }
        return basis;
    }
    std::vector<int> piv = rref(A);
    std::vector<bool> is_piv(A.cols, false);
    for (int c : piv) is_piv[c] = true;
    std::vector<QVec> basis;
    for (int c = 0; c < A.cols; ++c) {
        if (is_piv[c]) continue;
        QVec v(A.cols, Rat(0));
        v[c] = 1;
        for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -A.at(static_cast<int>(k), c);
        basis.push_back(v);
    }
    return basis;
}

bool solve_linear(const QMat& A, const QVec& b, QVec& x) {
    if (static_cast<int>(b.size()) != A.rows) throw InputError("solve_linear: size mismatch");
    QMat Ab(A.rows, A.cols + 1);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) Ab.at(i, j) = A.at(i, j);
        Ab.at(i, A.cols) = b[i];
    }
    std::vector<int> piv = rref(Ab);
    for (int c : piv)
        if (c == A.cols) return false;  // inconsistent row 0 = 1
    x.assign(A.cols, Rat(0));
    for (std::size_t k = 0; k < piv.size(); ++k) x[piv[k]] = Ab.at(static_cast<int>(k), A.cols);
    return true;
}

std::vector<QVec> span_basis(const std::vector<QVec>& vecs, int dim) {
    QMat A(0, dim);
    for (const auto& v : vecs) A.append_row(v);
    if (A.rows == 0) return {};
    std::vector<int> piv = rref(A);
    std::vector<QVec> basis;
    for (std::size_t k = 0; k < piv.size(); ++k) basis.push_back(A.row(static_cast<int>(k)));
    return basis;
}

bool in_span(const std::vector<QVec>& basis, const QVec& v, int dim) {
    QMat A(0, dim);
    for (const auto& b : basis) A.append_row(b);
    A.append_row(v);
    return rank(A) == static_cast<int>(span_basis(basis, dim).size());
}

QMat orthogonal_complement(const std::vector<QVec>& vecs, int dim) {
    QMat A(0, dim);
    for (const auto& v : vecs) A.append_row(v);
    std::vector<QVec> kb = kernel_basis(A);
    QMat R(0, dim);
    for (const auto& v : kb) R.append_row(v);
    return R;
}

}  // namespace stab
