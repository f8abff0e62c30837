#include "stab/problem.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace stab {

void ReferenceData::validate() const {
    if (n < 1 || m < 1 || s < 0) throw InputError("dimensions must satisfy n>=1, m>=1, s>=0");
    if (P.dim != m) throw InputError("block dimensions sum to " + std::to_string(P.dim) +
                                     ", expected m = " + std::to_string(m));
    if ((int)qbar.size() != m) throw InputError("q has wrong length");
    if (J.rows != m || J.cols != n) throw InputError("jacobian must be m x n");
    if ((int)Hq.size() != m) throw InputError("wrong number of constraint Hessians");
    for (int i = 0; i < m; ++i) {
        if (Hq[i].rows != n || Hq[i].cols != n)
            throw InputError("hess_q " + std::to_string(i + 1) + " must be n x n");
        if (!Hq[i].is_symmetric())
            throw InputError("hess_q " + std::to_string(i + 1) + " is not symmetric");
    }
    if ((int)grad_f.size() != n) throw InputError("grad_f has wrong length");
    if (Hf.rows != n || Hf.cols != n) throw InputError("hess_f must be n x n");
    if (!Hf.is_symmetric()) throw InputError("hess_f is not symmetric");
    if (has_F) {
        if ((int)Fbar.size() != n) throw InputError("F has wrong length");
        if (JF.rows != n || JF.cols != n) throw InputError("jac_F must be n x n");
    }
    if (!P.contains(qbar))
        throw InputError("reference constraint value lies outside the constraint set");
}

QMat ReferenceData::Qmat(const QVec& lambda) const {
    if ((int)lambda.size() != m) throw InputError("Qmat: multiplier has wrong length");
    QMat acc(n, n);
    for (int i = 0; i < m; ++i)
        if (lambda[i] != 0) acc = mat_add(acc, mat_scale(lambda[i], Hq[i]));
    return acc;
}

std::vector<double> ParamProblem::xbar_d() const {
    std::vector<double> v(xbar.size());
    for (std::size_t i = 0; i < xbar.size(); ++i) v[i] = to_double(xbar[i]);
    return v;
}

std::vector<double> ParamProblem::wbar_d() const {
    std::vector<double> v(wbar.size());
    for (std::size_t i = 0; i < wbar.size(); ++i) v[i] = to_double(wbar[i]);
    return v;
}

namespace {

// ---- file parsing ----------------------------------------------------------

struct Line {
    int no;
    std::string text;
};

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

QVec parse_rat_tokens(const std::vector<std::string>& toks, int line, std::size_t from = 0) {
    QVec v;
    for (std::size_t i = from; i < toks.size(); ++i) {
        try {
            v.push_back(parse_rat(toks[i]));
        } catch (const InputError& e) {
            throw ParseError(line, e.what());
        }
    }
    return v;
}

struct ProblemParser {
    std::vector<Line> lines;
    std::size_t at = 0;

    int n = -1, m = -1, s = -1;
    std::vector<Block> blocks;
    std::map<std::string, QVec> vecs;
    std::map<std::string, QMat> mats;
    std::map<std::string, std::pair<std::string, int>> expr_texts;  // name -> (text, line)
    std::vector<std::string> flags;

    explicit ProblemParser(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int no = 0;
        while (std::getline(in, raw)) {
            ++no;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw = raw.substr(0, hash);
            auto begin = raw.find_first_not_of(" \t\r");
            if (begin == std::string::npos) continue;
            auto end = raw.find_last_not_of(" \t\r");
            lines.push_back({no, raw.substr(begin, end - begin + 1)});
        }
    }

    bool done() const { return at >= lines.size(); }
    const Line& cur() const { return lines[at]; }

    void need_dims(int line) const {
        if (n < 0 || m < 0 || s < 0)
            throw ParseError(line, "[dimensions] with n, m, s must come first");
    }

    void parse() {
        while (!done()) {
            const Line& l = cur();
            if (l.text == "[dimensions]") parse_dimensions();
            else if (l.text == "[blocks]") parse_blocks();
            else if (l.text == "[reference]") parse_reference();
            else if (l.text == "[expressions]") parse_expressions();
            else if (l.text == "[flags]") parse_flags();
            else throw ParseError(l.no, "expected a section header, got '" + l.text + "'");
        }
    }

    bool at_section() const { return !done() && cur().text[0] == '['; }

    static std::pair<std::string, std::string> split_assign(const Line& l) {
        auto eq = l.text.find('=');
        if (eq == std::string::npos) throw ParseError(l.no, "expected 'key = value'");
        auto key_end = l.text.find_last_not_of(" \t", eq == 0 ? 0 : eq - 1);
        std::string key = eq == 0 ? "" : l.text.substr(0, key_end + 1);
        std::string val = l.text.substr(eq + 1);
        auto vb = val.find_first_not_of(" \t");
        val = vb == std::string::npos ? "" : val.substr(vb);
        if (key.empty()) throw ParseError(l.no, "missing key before '='");
        return {key, val};
    }

    void parse_dimensions() {
        ++at;
        while (!done() && !at_section()) {
            auto [key, val] = split_assign(cur());
            int v;
            try {
                v = std::stoi(val);
            } catch (...) {
                throw ParseError(cur().no, "bad integer for " + key);
            }
            if (key == "n") n = v;
            else if (key == "m") m = v;
            else if (key == "s") s = v;
            else throw ParseError(cur().no, "unknown dimension key '" + key + "'");
            ++at;
        }
        if (n < 1) throw ParseError(lines[at - 1].no, "n must be at least 1");
        if (m < 1) throw ParseError(lines[at - 1].no, "m must be at least 1");
        if (s < 0) throw ParseError(lines[at - 1].no, "s must be nonnegative");
    }

    void parse_blocks() {
        need_dims(cur().no);
        ++at;
        while (!done() && !at_section()) {
            const Line& l = cur();
            auto toks = split_ws(l.text);
            const std::string& kind = toks[0];
            auto block_size = [&]() {
                if (toks.size() != 2) throw ParseError(l.no, kind + " needs a size");
                int k = 0;
                try {
                    k = std::stoi(toks[1]);
                } catch (...) {
                    throw ParseError(l.no, "bad size for " + kind);
                }
                if (k < 1) throw ParseError(l.no, kind + " size must be positive");
                return k;
            };
            if (kind == "nonpos") blocks.push_back(Block::nonpos(block_size()));
            else if (kind == "zero") blocks.push_back(Block::zero(block_size()));
            else if (kind == "free") blocks.push_back(Block::free_block(block_size()));
            else if (kind == "ec") blocks.push_back(Block::ec());
            else if (kind == "vc") blocks.push_back(Block::vc());
            else if (kind == "union") blocks.push_back(parse_union(block_size()));
            else throw ParseError(l.no, "unknown block kind '" + kind + "'");
            ++at;
        }
        if (blocks.empty()) throw ParseError(lines[at - 1].no, "[blocks] lists no blocks");
    }

    // The cursor sits on the "union <d>" line; afterwards it sits on "end"
    // (the caller advances past it).
    Block parse_union(int d) {
        int start = cur().no;
        ++at;
        std::vector<Polyhedron> pieces;
        bool open = false;
        Polyhedron cur_piece(d);
        while (!done() && cur().text != "end") {
            const Line& l = cur();
            auto toks = split_ws(l.text);
            if (toks[0] == "piece") {
                if (open) pieces.push_back(cur_piece);
                cur_piece = Polyhedron(d);
                open = true;
            } else if (toks[0] == "ineq" || toks[0] == "eq") {
                if (!open) throw ParseError(l.no, "constraint row before any 'piece'");
                auto bar = std::find(toks.begin(), toks.end(), "|");
                if (bar == toks.end() || bar + 2 != toks.end())
                    throw ParseError(l.no, "expected '<kind> a1 .. ad | b'");
                std::vector<std::string> coef(toks.begin() + 1, bar);
                if ((int)coef.size() != d)
                    throw ParseError(l.no, "row needs " + std::to_string(d) + " coefficients");
                QVec a = parse_rat_tokens(coef, l.no);
                Rat b;
                try {
                    b = parse_rat(*(bar + 1));
                } catch (const InputError& e) {
                    throw ParseError(l.no, e.what());
                }
                if (toks[0] == "ineq") cur_piece.add_ineq(a, b);
                else cur_piece.add_eq(a, b);
            } else {
                throw ParseError(l.no, "expected 'piece', a constraint row, or 'end'");
            }
            ++at;
        }
        if (done()) throw ParseError(start, "union block never closed with 'end'");
        if (open) pieces.push_back(cur_piece);
        if (pieces.empty()) throw ParseError(start, "union block has no pieces");
        return Block::union_of(std::move(pieces));
    }

    int matrix_rows(const std::string& key, int line) const {
        if (key == "jacobian") return m;
        if (key == "hess_f" || key == "jac_F") return n;
        if (key.rfind("hess_q", 0) == 0) return n;
        throw ParseError(line, "'" + key + "' is not a matrix key");
    }

    void parse_reference() {
        need_dims(cur().no);
        ++at;
        while (!done() && !at_section()) {
            const Line& l = cur();
            auto [key, val] = split_assign(l);
            auto keytoks = split_ws(key);
            std::string base = keytoks[0];
            bool is_matrix = base == "jacobian" || base == "hess_f" || base == "jac_F" ||
                             base == "hess_q";
            if (!val.empty()) {
                if (is_matrix)
                    throw ParseError(l.no, "matrix rows for '" + base +
                                               "' start on the following line");
                if (vecs.count(key)) throw ParseError(l.no, "duplicate key '" + key + "'");
                vecs[key] = parse_rat_tokens(split_ws(val), l.no);
                ++at;
                continue;
            }
            if (!is_matrix) throw ParseError(l.no, "missing value for '" + key + "'");
            // matrix value: rows follow on their own lines
            int rows = matrix_rows(base, l.no);
            std::string mk = base;
            if (base == "hess_q") {
                if (keytoks.size() != 2) throw ParseError(l.no, "hess_q needs a row index");
                int idx;
                try {
                    idx = std::stoi(keytoks[1]);
                } catch (...) {
                    throw ParseError(l.no, "bad hess_q index");
                }
                if (idx < 1 || idx > m) throw ParseError(l.no, "hess_q index out of range");
                mk = "hess_q " + std::to_string(idx);
            } else if (keytoks.size() != 1) {
                throw ParseError(l.no, "unexpected tokens after '" + base + "'");
            }
            if (mats.count(mk)) throw ParseError(l.no, "duplicate key '" + mk + "'");
            int cols = n;
            QMat mtx(0, cols);
            ++at;
            for (int r = 0; r < rows; ++r) {
                if (done() || at_section())
                    throw ParseError(l.no, mk + " needs " + std::to_string(rows) + " rows");
                QVec row = parse_rat_tokens(split_ws(cur().text), cur().no);
                if ((int)row.size() != cols)
                    throw ParseError(cur().no, mk + " row needs " + std::to_string(cols) +
                                                   " entries");
                mtx.append_row(row);
                ++at;
            }
            mats[mk] = std::move(mtx);
        }
    }

    void parse_expressions() {
        ++at;
        while (!done() && !at_section()) {
            auto [key, val] = split_assign(cur());
            if (val.empty()) throw ParseError(cur().no, "empty expression for " + key);
            if (expr_texts.count(key))
                throw ParseError(cur().no, "duplicate expression for " + key);
            expr_texts[key] = {val, cur().no};
            ++at;
        }
    }

    void parse_flags() {
        ++at;
        while (!done() && !at_section()) {
            auto [key, val] = split_assign(cur());
            if (key != "nondifferentiable_at_ref")
                throw ParseError(cur().no, "unknown flag '" + key + "'");
            for (char& c : val)
                if (c == '[' || c == ']' || c == ',') c = ' ';
            for (auto& name : split_ws(val)) flags.push_back(name);
            ++at;
        }
    }

    QVec take_vec(const std::string& key, int len, bool required) {
        auto it = vecs.find(key);
        if (it == vecs.end()) {
            if (required) throw InputError("[reference] is missing '" + key + "'");
            return {};
        }
        if ((int)it->second.size() != len)
            throw InputError("'" + key + "' needs " + std::to_string(len) + " entries");
        return it->second;
    }

    ParamProblem build(const std::string& name) {
        if (n < 0) throw InputError("problem file has no [dimensions] section");
        if (blocks.empty()) throw InputError("problem file has no [blocks] section");
        ParamProblem p;
        p.name = name;
        ReferenceData& rd = p.ref;
        rd.n = n;
        rd.m = m;
        rd.s = s;
        for (auto& b : blocks) rd.P.add(b);
        p.xbar = take_vec("x_bar", n, true);
        p.wbar = s == 0 ? QVec{} : take_vec("omega_bar", s, true);
        rd.qbar = take_vec("q", m, true);
        rd.grad_f = take_vec("grad_f", n, true);
        auto take_mat = [&](const std::string& key, int rows, bool required) {
            auto it = mats.find(key);
            if (it == mats.end()) {
                if (required) throw InputError("[reference] is missing '" + key + "'");
                return QMat(0, 0);
            }
            if (it->second.rows != rows)
                throw InputError("'" + key + "' needs " + std::to_string(rows) + " rows");
            return it->second;
        };
        rd.J = take_mat("jacobian", m, true);
        rd.Hf = take_mat("hess_f", n, true);
        for (int i = 1; i <= m; ++i) {
            QMat h = take_mat("hess_q " + std::to_string(i), n, false);
            rd.Hq.push_back(h.rows == 0 ? QMat(n, n) : std::move(h));
        }
        QVec fv = take_vec("F", n, false);
        QMat jf = take_mat("jac_F", n, false);
        if (!fv.empty() || jf.rows > 0) {
            if (fv.empty() || jf.rows == 0)
                throw InputError("F and jac_F must be given together");
            rd.has_F = true;
            rd.Fbar = fv;
            rd.JF = jf;
        }
        rd.validate();

        if (!expr_texts.empty()) {
            ExprSet es;
            auto take_expr = [&](const std::string& key, bool required) {
                auto it = expr_texts.find(key);
                if (it == expr_texts.end()) {
                    if (required)
                        throw InputError("[expressions] is missing '" + key + "'");
                    return Expr{};
                }
                try {
                    Expr e = parse_expr(it->second.first, n, s);
                    expr_texts.erase(it);
                    return e;
                } catch (const InputError& err) {
                    throw ParseError(it->second.second,
                                     "in expression for " + key + ": " + err.what());
                }
            };
            es.f = take_expr("f", true);
            for (int i = 1; i <= m; ++i)
                es.q.push_back(take_expr("q" + std::to_string(i), true));
            bool any_F = expr_texts.count("F1") > 0;
            if (any_F)
                for (int i = 1; i <= n; ++i)
                    es.F.push_back(take_expr("F" + std::to_string(i), true));
            if (!expr_texts.empty())
                throw ParseError(expr_texts.begin()->second.second,
                                 "unknown expression name '" + expr_texts.begin()->first + "'");
            p.exprs = std::move(es);
        }

        for (const auto& fl : flags) {
            bool ok = fl == "f";
            if (fl.size() > 1 && (fl[0] == 'q' || fl[0] == 'F')) ok = true;
            if (!ok) throw InputError("flagged name '" + fl + "' is not an entry");
            p.nondiff.push_back(fl);
        }
        return p;
    }
};

double norm2(const std::vector<double>& v) {
    double acc = 0;
    for (double t : v) acc += t * t;
    return std::sqrt(acc);
}

double mat_norm(const std::vector<std::vector<double>>& rows, int cols, NormKind norm) {
    if (rows.empty() || cols == 0) return 0;
    Eigen::MatrixXd M((int)rows.size(), cols);
    for (int i = 0; i < (int)rows.size(); ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = rows[i][j];
    if (norm == NormKind::Frobenius) return M.norm();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

bool is_flagged(const ParamProblem& p, const std::string& name) {
    for (const auto& fl : p.nondiff)
        if (fl == name) return true;
    return false;
}

}  // namespace

ParamProblem parse_problem(const std::string& text, const std::string& name) {
    ProblemParser pp(text);
    pp.parse();
    ParamProblem p = pp.build(name);
    if (p.has_expressions()) check_consistency(p);
    return p;
}

ParamProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    return parse_problem(buf.str(), base);
}

void check_consistency(const ParamProblem& p, double tol) {
    if (!p.has_expressions()) return;
    const ReferenceData& rd = p.ref;
    std::vector<double> x = p.xbar_d(), w = p.wbar_d();
    auto close = [&](double a, const Rat& ref) {
        double r = to_double(ref);
        return std::abs(a - r) <= tol * std::max(1.0, std::abs(r));
    };
    auto check_entry = [&](const std::string& name, const Expr& e, const QVec* val_ref,
                           int val_index, const QVec* grad_ref, const QMat* grad_row_of,
                           int grad_row, const QMat* hess_ref) {
        if (is_flagged(p, name)) return;
        D2d d;
        try {
            d = e.eval2(x, w);
        } catch (const EvalError& err) {
            throw InputError(name + " cannot be evaluated at the reference point (" +
                             err.what() + "); flag it nondifferentiable_at_ref if intended");
        }
        if (val_ref && !close(d.v, (*val_ref)[val_index]))
            throw InputError(name + " value disagrees with the reference data");
        for (int j = 0; j < rd.n; ++j) {
            Rat r = grad_ref ? (*grad_ref)[j] : grad_row_of->at(grad_row, j);
            if (!close(d.g[j], r))
                throw InputError(name + " gradient disagrees with the reference data");
        }
        if (hess_ref)
            for (int i = 0; i < rd.n; ++i)
                for (int j = 0; j < rd.n; ++j)
                    if (!close(d.h[(std::size_t)i * rd.n + j], hess_ref->at(i, j)))
                        throw InputError(name + " Hessian disagrees with the reference data");
    };
    const ExprSet& es = *p.exprs;
    check_entry("f", es.f, nullptr, 0, &rd.grad_f, nullptr, 0, &rd.Hf);
    for (int i = 0; i < rd.m; ++i)
        check_entry("q" + std::to_string(i + 1), es.q[i], &rd.qbar, i, nullptr, &rd.J, i,
                    &rd.Hq[i]);
    if (!es.F.empty()) {
        if (!rd.has_F)
            throw InputError("F expressions given without reference F data");
        for (int i = 0; i < rd.n; ++i)
            check_entry("F" + std::to_string(i + 1), es.F[i], &rd.Fbar, i, nullptr, &rd.JF,
                        i, nullptr);
    }
}

QFEval eval_qf(const ParamProblem& p, const std::vector<double>& x,
               const std::vector<double>& w) {
    if (!p.has_expressions())
        throw InputError("problem '" + p.name + "' carries no expressions");
    if ((int)x.size() != p.ref.n || (int)w.size() != p.ref.s)
        throw InputError("eval_qf: point has wrong dimensions");
    const ExprSet& es = *p.exprs;
    QFEval out;
    D2d df = es.f.eval2(x, w);
    out.f = df.v;
    out.gf = std::move(df.g);
    out.hf = std::move(df.h);
    for (const Expr& e : es.q) {
        D2d d = e.eval2(x, w);
        out.q.push_back(d.v);
        out.gq.push_back(std::move(d.g));
        out.hq.push_back(std::move(d.h));
    }
    for (const Expr& e : es.F) out.F.push_back(e.value(x, w));
    return out;
}

ErrorMeasures error_measures(const ParamProblem& p, const std::vector<double>& w,
                             NormKind norm) {
    if (!p.has_expressions())
        throw InputError("error measures need expressions for '" + p.name + "'");
    if ((int)w.size() != p.ref.s)
        throw InputError("error_measures: parameter has wrong dimension");
    std::vector<double> x = p.xbar_d(), w0 = p.wbar_d();
    // Both sides come from the expressions so the measures vanish exactly at
    // the reference parameter.
    QFEval a = eval_qf(p, x, w);
    QFEval b = eval_qf(p, x, w0);
    std::vector<double> dq(p.ref.m);
    std::vector<std::vector<double>> dJ(p.ref.m, std::vector<double>(p.ref.n));
    for (int i = 0; i < p.ref.m; ++i) {
        dq[i] = a.q[i] - b.q[i];
        for (int j = 0; j < p.ref.n; ++j) dJ[i][j] = a.gq[i][j] - b.gq[i][j];
    }
    double jac_drift = mat_norm(dJ, p.ref.n, norm);
    double val_drift = norm2(dq);
    ErrorMeasures em;
    em.e1 = jac_drift + val_drift;
    em.e2 = jac_drift + std::sqrt(val_drift);
    std::vector<double> dgf(p.ref.n);
    for (int j = 0; j < p.ref.n; ++j) dgf[j] = a.gf[j] - b.gf[j];
    double obj_drift = norm2(dgf);
    em.tau1 = em.e1 + obj_drift;
    em.tau2 = em.e2 + obj_drift;
    if (!a.F.empty()) {
        em.has_hat = true;
        std::vector<double> dF(p.ref.n);
        for (int j = 0; j < p.ref.n; ++j) dF[j] = a.F[j] - b.F[j];
        double f_drift = norm2(dF);
        em.tau1_hat = em.e1 + f_drift;
        em.tau2_hat = em.e2 + f_drift;
    }
    return em;
}

}  // namespace stab
