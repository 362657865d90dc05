// SPDX-License-Identifier: Apache-2.0
//
// swpt - sensing-assisted wireless power transfer toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SWPT_SDP_HPP
#define SWPT_SDP_HPP

// Small dense semidefinite programming.
//
// A Problem is written in terms of matrix variables (complex Hermitian or real
// symmetric, each implicitly constrained PSD) and free scalar variables. Every
// variable is flattened into real coordinates; objective and equalities are
// affine in the coordinates and each LMI is an affine Hermitian matrix
// expression. solve() eliminates the equalities, maps complex blocks to their
// real symmetric embedding, and runs an infeasible primal-dual path-following
// method (HKM direction, Mehrotra predictor-corrector) on
//
//     (P)  min <C, X>      s.t. <A_j, X> = b_j,  X >= 0
//     (D)  max b^T y       s.t. C - sum_j y_j A_j = S >= 0
//
// where (D) is the user's LMI problem after elimination and normalization.

#include "common.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace swpt::sdp
{
    // Affine real-valued function of the coordinates
    struct LinearForm
    {
        double constant = 0.0;
        std::vector<std::pair<int, double>> terms;

        LinearForm &add(int coord, double coef)
        {
            if (coef != 0.0)
                terms.emplace_back(coord, coef);
            return *this;
        }
        LinearForm &operator+=(const LinearForm &o)
        {
            constant += o.constant;
            terms.insert(terms.end(), o.terms.begin(), o.terms.end());
            return *this;
        }
        LinearForm &operator*=(double s)
        {
            constant *= s;
            for (auto &t : terms)
                t.second *= s;
            return *this;
        }
        friend LinearForm operator+(LinearForm a, const LinearForm &b) { return a += b; }
        friend LinearForm operator-(LinearForm a, LinearForm b) { return a += (b *= -1.0); }
        friend LinearForm operator*(double s, LinearForm a) { return a *= s; }

        double evaluate(const RealVector &coords) const
        {
            double v = constant;
            for (const auto &[k, c] : terms)
                v += c * coords(k);
            return v;
        }
    };

    // Affine Hermitian-matrix-valued function of the coordinates
    struct MatrixForm
    {
        ComplexMatrix constant;
        std::vector<std::pair<int, ComplexMatrix>> terms;

        MatrixForm() = default;
        explicit MatrixForm(Eigen::Index dim) : constant(ComplexMatrix::Zero(dim, dim)) {}

        Eigen::Index dim() const { return constant.rows(); }

        MatrixForm &add(int coord, ComplexMatrix coef)
        {
            if (coef.rows() != dim() || coef.cols() != dim())
                throw DimensionError("MatrixForm::add: term dimension mismatch");
            terms.emplace_back(coord, std::move(coef));
            return *this;
        }

        ComplexMatrix evaluate(const RealVector &coords) const
        {
            ComplexMatrix v = constant;
            for (const auto &[k, c] : terms)
                v += coords(k) * c;
            return v;
        }
    };

    // 1x1 LMI expressing f >= 0
    inline MatrixForm as_matrix_form(const LinearForm &f)
    {
        MatrixForm m(1);
        m.constant(0, 0) = f.constant;
        for (const auto &[k, c] : f.terms)
            m.add(k, ComplexMatrix::Constant(1, 1, c));
        return m;
    }

    enum class Sense
    {
        minimize,
        maximize
    };

    enum class Status
    {
        optimal,
        infeasible,
        numerical_failure
    };

    inline const char *to_string(Status s)
    {
        switch (s)
        {
        case Status::optimal:
            return "optimal";
        case Status::infeasible:
            return "infeasible";
        default:
            return "numerical-failure";
        }
    }

    class Problem
    {
    public:
        struct MatrixVariable
        {
            std::string name;
            int dim;
            bool complex;
            int first_coord;
            int n_coords;
        };
        struct ScalarVariable
        {
            std::string name;
            int coord;
        };
        struct Equality
        {
            LinearForm lhs;
            double rhs;
        };
        struct Lmi
        {
            MatrixForm expr;
            std::string label;
        };

        // Hermitian (complex=true) or real symmetric matrix variable, constrained PSD.
        // Coordinates: diagonal entries, then Re/Im of the strict upper triangle.
        int add_matrix_variable(std::string name, int dim, bool complex = true)
        {
            if (dim < 1)
                throw DimensionError("matrix variable dimension must be >= 1");
            const int off = dim * (dim - 1) / 2;
            const int n = dim + (complex ? 2 * off : off);
            matrix_vars_.push_back({std::move(name), dim, complex, n_coords_, n});
            n_coords_ += n;
            return static_cast<int>(matrix_vars_.size()) - 1;
        }

        int add_scalar_variable(std::string name)
        {
            scalar_vars_.push_back({std::move(name), n_coords_});
            ++n_coords_;
            return static_cast<int>(scalar_vars_.size()) - 1;
        }

        int coordinate_count() const { return n_coords_; }
        const std::vector<MatrixVariable> &matrix_variables() const { return matrix_vars_; }
        const std::vector<ScalarVariable> &scalar_variables() const { return scalar_vars_; }
        const std::vector<Equality> &equalities() const { return equalities_; }
        const std::vector<Lmi> &lmis() const { return lmis_; }
        const LinearForm &objective() const { return objective_; }
        Sense sense() const { return sense_; }

        // Matrix corresponding to unit value of local coordinate `local` of variable `var`
        ComplexMatrix basis_element(int var, int local) const
        {
            const auto &v = matrix_vars_.at(var);
            ComplexMatrix e = ComplexMatrix::Zero(v.dim, v.dim);
            if (local < v.dim)
            {
                e(local, local) = 1.0;
                return e;
            }
            int k = local - v.dim;
            const int off = v.dim * (v.dim - 1) / 2;
            const bool imag = k >= off;
            if (imag)
                k -= off;
            auto [i, j] = upper_index(v.dim, k);
            if (imag)
            {
                e(i, j) = Complex(0.0, 1.0);
                e(j, i) = Complex(0.0, -1.0);
            }
            else
            {
                e(i, j) = 1.0;
                e(j, i) = 1.0;
            }
            return e;
        }

        LinearForm scalar(int var, double coef = 1.0) const
        {
            LinearForm f;
            f.add(scalar_vars_.at(var).coord, coef);
            return f;
        }

        // Re tr(C^H X) for matrix variable X
        LinearForm inner(int var, const ComplexMatrix &c) const
        {
            const auto &v = matrix_vars_.at(var);
            require_square(c, v.dim, "Problem::inner");
            LinearForm f;
            for (int k = 0; k < v.n_coords; ++k)
                f.add(v.first_coord + k, (c.adjoint() * basis_element(var, k)).trace().real());
            return f;
        }

        LinearForm trace(int var) const
        {
            const int n = matrix_vars_.at(var).dim;
            return inner(var, ComplexMatrix::Identity(n, n));
        }

        // Image of matrix variable X under a real-linear map into out_dim x out_dim Hermitian matrices
        MatrixForm linear_image(int var, Eigen::Index out_dim,
                                const std::function<ComplexMatrix(const ComplexMatrix &)> &map) const
        {
            const auto &v = matrix_vars_.at(var);
            MatrixForm f(out_dim);
            for (int k = 0; k < v.n_coords; ++k)
                f.add(v.first_coord + k, map(basis_element(var, k)));
            return f;
        }

        void set_objective(Sense sense, LinearForm f)
        {
            check_form(f);
            sense_ = sense;
            objective_ = std::move(f);
        }

        void add_equality(LinearForm lhs, double rhs)
        {
            check_form(lhs);
            equalities_.push_back({std::move(lhs), rhs});
        }

        // Require expr >= 0 (PSD)
        void add_lmi(MatrixForm expr, std::string label = {})
        {
            if (expr.dim() < 1)
                throw DimensionError("LMI must have dimension >= 1");
            for (const auto &[k, m] : expr.terms)
            {
                if (k < 0 || k >= n_coords_)
                    throw DimensionError("LMI references undeclared coordinate");
                if (hermitian_defect(m) > 1e-12)
                    throw DimensionError("LMI term is not Hermitian");
            }
            if (hermitian_defect(expr.constant) > 1e-12)
                throw DimensionError("LMI constant is not Hermitian");
            lmis_.push_back({std::move(expr), std::move(label)});
        }

        // Value of a matrix variable at a coordinate vector
        ComplexMatrix matrix_value(int var, const RealVector &coords) const
        {
            const auto &v = matrix_vars_.at(var);
            ComplexMatrix x = ComplexMatrix::Zero(v.dim, v.dim);
            for (int k = 0; k < v.n_coords; ++k)
            {
                const double c = coords(v.first_coord + k);
                if (c != 0.0)
                    x += c * basis_element(var, k);
            }
            return x;
        }

    private:
        static std::pair<int, int> upper_index(int dim, int k)
        {
            for (int i = 0; i < dim; ++i)
            {
                const int row = dim - 1 - i;
                if (k < row)
                    return {i, i + 1 + k};
                k -= row;
            }
            throw std::out_of_range("upper_index");
        }

        void check_form(const LinearForm &f) const
        {
            for (const auto &[k, c] : f.terms)
                if (k < 0 || k >= n_coords_)
                    throw DimensionError("linear form references undeclared coordinate");
        }

        std::vector<MatrixVariable> matrix_vars_;
        std::vector<ScalarVariable> scalar_vars_;
        std::vector<Equality> equalities_;
        std::vector<Lmi> lmis_;
        LinearForm objective_;
        Sense sense_ = Sense::minimize;
        int n_coords_ = 0;
    };

    struct Options
    {
        double tol = 1e-8;
        int max_iterations = 200;
        // When the iteration stalls short of tol, the best iterate is still
        // reported optimal if its residuals are below this
        double accept_tol = 1e-6;
    };

    struct Solution
    {
        Status status = Status::numerical_failure;
        std::string diagnostic;
        RealVector coordinates;
        std::vector<ComplexMatrix> matrix_values; // indexed like Problem::matrix_variables()
        std::vector<double> scalar_values;        // indexed like Problem::scalar_variables()
        double objective_value = std::numeric_limits<double>::quiet_NaN();
        // Bound from the dual iterate: <= objective for minimization, >= for maximization
        double dual_bound = std::numeric_limits<double>::quiet_NaN();
        double relative_duality_gap = std::numeric_limits<double>::infinity();
        double primal_infeasibility = std::numeric_limits<double>::infinity();
        double dual_infeasibility = std::numeric_limits<double>::infinity();
        int iterations = 0;

        bool ok() const { return status == Status::optimal; }
    };

    namespace detail
    {
        struct Block
        {
            RealMatrix c;
            std::vector<std::pair<int, RealMatrix>> a; // (variable index, coefficient)
        };

        struct StandardForm
        {
            std::vector<Block> blocks;
            RealVector b;
            int m = 0;
        };

        using BlockVec = std::vector<RealMatrix>;

        inline double inner(const BlockVec &x, const BlockVec &y)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                s += x[i].cwiseProduct(y[i]).sum();
            return s;
        }

        inline double norm(const BlockVec &x) { return std::sqrt(inner(x, x)); }

        // sum(A_j .* Z) over blocks, for every j
        inline RealVector apply_adjoint(const StandardForm &sf, const BlockVec &z)
        {
            RealVector out = RealVector::Zero(sf.m);
            for (std::size_t bi = 0; bi < sf.blocks.size(); ++bi)
                for (const auto &[j, a] : sf.blocks[bi].a)
                    out(j) += a.cwiseProduct(z[bi]).sum();
            return out;
        }

        // sum_j y_j A_j
        inline BlockVec apply(const StandardForm &sf, const RealVector &y)
        {
            BlockVec out;
            out.reserve(sf.blocks.size());
            for (const auto &blk : sf.blocks)
            {
                RealMatrix s = RealMatrix::Zero(blk.c.rows(), blk.c.cols());
                for (const auto &[j, a] : blk.a)
                    s += y(j) * a;
                out.push_back(std::move(s));
            }
            return out;
        }

        // Largest alpha with X + alpha dX PSD (capped at `cap`); X must be PD
        inline double max_step(const BlockVec &x, const BlockVec &dx, double cap)
        {
            double alpha = cap;
            for (std::size_t i = 0; i < x.size(); ++i)
            {
                if (x[i].rows() == 1)
                {
                    if (dx[i](0, 0) < 0.0)
                        alpha = std::min(alpha, -x[i](0, 0) / dx[i](0, 0));
                    continue;
                }
                Eigen::LLT<RealMatrix> llt(x[i]);
                if (llt.info() != Eigen::Success)
                    return 0.0;
                RealMatrix linv_dx = llt.matrixL().solve(dx[i]);
                RealMatrix q = llt.matrixL().solve(linv_dx.transpose());
                q = 0.5 * (q + q.transpose());
                const double lmin = Eigen::SelfAdjointEigenSolver<RealMatrix>(q, Eigen::EigenvaluesOnly).eigenvalues()(0);
                if (lmin < 0.0)
                    alpha = std::min(alpha, -1.0 / lmin);
            }
            return alpha;
        }

        inline std::optional<BlockVec> inverse(const BlockVec &x)
        {
            BlockVec out;
            out.reserve(x.size());
            for (const auto &b : x)
            {
                Eigen::LLT<RealMatrix> llt(b);
                if (llt.info() != Eigen::Success)
                    return std::nullopt;
                RealMatrix inv = llt.solve(RealMatrix::Identity(b.rows(), b.cols()));
                out.push_back(0.5 * (inv + inv.transpose()));
            }
            return out;
        }

        struct IpmResult
        {
            Status status = Status::numerical_failure;
            std::string diagnostic;
            RealVector y;
            BlockVec x;
            double pobj = 0.0, dobj = 0.0, gap = 0.0, pinf = 0.0, dinf = 0.0;
            int iterations = 0;
        };

        inline IpmResult run_ipm(const StandardForm &sf, const Options &opt)
        {
            const int m = sf.m;
            const std::size_t nb = sf.blocks.size();
            int n_total = 0;
            double c_norm2 = 0.0;
            double a_max = 0.0;
            BlockVec c;
            for (const auto &blk : sf.blocks)
            {
                n_total += static_cast<int>(blk.c.rows());
                c_norm2 += blk.c.squaredNorm();
                c.push_back(blk.c);
                for (const auto &[j, a] : blk.a)
                    a_max = std::max(a_max, a.norm());
            }
            const double c_norm = std::sqrt(c_norm2);
            const double b_norm = sf.b.norm();

            // Initial point in the spirit of SDPT3
            const double sqn = std::sqrt(static_cast<double>(n_total));
            double xi = std::max(10.0, sqn);
            for (int j = 0; j < m; ++j)
                xi = std::max(xi, sqn * (1.0 + std::abs(sf.b(j))) / (1.0 + a_max));
            const double eta = std::max({10.0, sqn, c_norm, a_max});

            BlockVec x, s;
            for (const auto &blk : sf.blocks)
            {
                const auto n = blk.c.rows();
                x.push_back(xi * RealMatrix::Identity(n, n));
                s.push_back(eta * RealMatrix::Identity(n, n));
            }
            RealVector y = RealVector::Zero(m);

            IpmResult res;
            IpmResult best;
            double best_merit = std::numeric_limits<double>::infinity();
            int since_best = 0;
            auto give_up = [&](std::string why) -> IpmResult
            {
                if (best_merit <= opt.accept_tol)
                {
                    best.status = Status::optimal;
                    best.diagnostic = "reduced accuracy (" + why + ")";
                    return best;
                }
                res.status = Status::numerical_failure;
                res.diagnostic = std::move(why);
                return res;
            };
            for (int iter = 0; iter <= opt.max_iterations; ++iter)
            {
                res.iterations = iter;
                // Residuals
                RealVector rp = sf.b - apply_adjoint(sf, x);
                BlockVec ay = apply(sf, y);
                BlockVec rd(nb);
                for (std::size_t i = 0; i < nb; ++i)
                    rd[i] = c[i] - s[i] - ay[i];

                const double pobj = inner(c, x);
                const double dobj = sf.b.dot(y);
                const double mu = inner(x, s) / n_total;
                const double pinf = rp.norm() / (1.0 + b_norm);
                const double dinf = norm(rd) / (1.0 + c_norm);
                const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
                res.pobj = pobj;
                res.dobj = dobj;
                res.gap = gap;
                res.pinf = pinf;
                res.dinf = dinf;
                res.x = x;
                res.y = y;

                if (gap <= opt.tol && pinf <= opt.tol && dinf <= opt.tol)
                {
                    res.status = Status::optimal;
                    return res;
                }
                const double merit = std::max({gap, pinf, dinf});
                if (merit < 0.5 * best_merit)
                    since_best = 0;
                else
                    ++since_best;
                if (merit < best_merit)
                {
                    best_merit = merit;
                    best = res;
                }
                if (since_best >= 8 && best_merit <= opt.accept_tol)
                    return give_up("stalled");

                // Certificate that the LMI system admits no feasible point: X >= 0, A(X) = 0, <C, X> < 0
                const double x_norm = norm(x);
                if (x_norm > 1e10 && pobj < 0.0)
                {
                    const double scale = -pobj;
                    const RealVector ax = apply_adjoint(sf, x);
                    if (ax.norm() / scale < 1e-6)
                    {
                        res.status = Status::infeasible;
                        res.diagnostic = "LMI constraints are infeasible (Farkas certificate found)";
                        return res;
                    }
                }
                if (y.norm() > 1e10 && dobj > 0.0 && norm(rd) / dobj < 1e-6)
                {
                    res.status = Status::numerical_failure;
                    res.diagnostic = "objective unbounded";
                    return res;
                }
                if (iter == opt.max_iterations)
                    break;

                auto s_inv_opt = inverse(s);
                if (!s_inv_opt)
                    return give_up("slack lost positive definiteness");
                const BlockVec &s_inv = *s_inv_opt;

                // Schur complement M_ij = tr(A_i X A_j S^-1)
                RealMatrix mat = RealMatrix::Zero(m, m);
                for (std::size_t bi = 0; bi < nb; ++bi)
                {
                    const auto &blk = sf.blocks[bi];
                    for (const auto &[j, aj] : blk.a)
                    {
                        const RealMatrix p = x[bi] * aj * s_inv[bi];
                        for (const auto &[i, ai] : blk.a)
                            if (i <= j)
                                mat(i, j) += ai.cwiseProduct(p).sum();
                    }
                }
                mat.triangularView<Eigen::StrictlyLower>() = mat.transpose().triangularView<Eigen::StrictlyLower>();
                Eigen::LLT<RealMatrix> schur(mat);
                if (schur.info() != Eigen::Success)
                {
                    const double reg = 1e-14 * std::max(1.0, mat.diagonal().cwiseAbs().maxCoeff());
                    schur.compute(mat + reg * RealMatrix::Identity(m, m));
                    if (schur.info() != Eigen::Success)
                        return give_up("Schur complement matrix is singular");
                }

                auto direction = [&](const BlockVec &rc, RealVector &dy, BlockVec &dx, BlockVec &ds)
                {
                    BlockVec w(nb);
                    for (std::size_t i = 0; i < nb; ++i)
                        w[i] = (x[i] * rd[i] - rc[i]) * s_inv[i];
                    RealVector rhs = rp + apply_adjoint(sf, w);
                    dy = schur.solve(rhs);
                    BlockVec ady = apply(sf, dy);
                    ds.resize(nb);
                    dx.resize(nb);
                    for (std::size_t i = 0; i < nb; ++i)
                    {
                        ds[i] = rd[i] - ady[i];
                        RealMatrix t = (rc[i] - x[i] * ds[i]) * s_inv[i];
                        dx[i] = 0.5 * (t + t.transpose());
                    }
                };

                // Predictor
                BlockVec rc(nb);
                for (std::size_t i = 0; i < nb; ++i)
                    rc[i] = -x[i] * s[i];
                RealVector dy_a;
                BlockVec dx_a, ds_a;
                direction(rc, dy_a, dx_a, ds_a);
                const double ap = std::min(1.0, max_step(x, dx_a, 1e300));
                const double ad = std::min(1.0, max_step(s, ds_a, 1e300));
                double xs_aff = 0.0;
                for (std::size_t i = 0; i < nb; ++i)
                    xs_aff += (x[i] + ap * dx_a[i]).cwiseProduct(s[i] + ad * ds_a[i]).sum();
                const double ratio = std::clamp(xs_aff / (mu * n_total), 0.0, 1.0);
                const double sigma = std::max(ratio * ratio * ratio, 0.0);

                // Corrector
                for (std::size_t i = 0; i < nb; ++i)
                {
                    const auto n = x[i].rows();
                    rc[i] = sigma * mu * RealMatrix::Identity(n, n) - x[i] * s[i] - dx_a[i] * ds_a[i];
                }
                RealVector dy;
                BlockVec dx, ds;
                direction(rc, dy, dx, ds);

                const double gamma = std::max(0.9, 1.0 - 5.0 * std::min(gap, 1.0));
                const double gamma_cap = std::min(gamma, 0.98);
                const double step_p = std::min(1.0, gamma_cap * max_step(x, dx, 1e300));
                const double step_d = std::min(1.0, gamma_cap * max_step(s, ds, 1e300));
                if (step_p < 1e-12 && step_d < 1e-12)
                    return give_up("step length collapsed");
                for (std::size_t i = 0; i < nb; ++i)
                {
                    x[i] += step_p * dx[i];
                    s[i] += step_d * ds[i];
                    x[i] = 0.5 * (x[i] + x[i].transpose());
                    s[i] = 0.5 * (s[i] + s[i].transpose());
                }
                y += step_d * dy;
            }
            return give_up("iteration limit reached (gap " + std::to_string(res.gap) + ", pinf " +
                           std::to_string(res.pinf) + ", dinf " + std::to_string(res.dinf) + ")");
        }
    }

    inline Solution solve(const Problem &problem, const Options &opt = {})
    {
        using namespace detail;
        const int m = problem.coordinate_count();
        Solution sol;
        if (m == 0)
            throw DimensionError("SDP has no variables");

        // ---- raw blocks over the original coordinates ----------------------
        struct RawBlock
        {
            RealMatrix c;
            std::vector<std::optional<RealMatrix>> a; // per coordinate
        };
        std::vector<RawBlock> raw;

        for (int v = 0; v < static_cast<int>(problem.matrix_variables().size()); ++v)
        {
            const auto &mv = problem.matrix_variables()[v];
            const int n = mv.complex ? 2 * mv.dim : mv.dim;
            RawBlock rb{RealMatrix::Zero(n, n), std::vector<std::optional<RealMatrix>>(m)};
            for (int k = 0; k < mv.n_coords; ++k)
            {
                const ComplexMatrix e = problem.basis_element(v, k);
                rb.a[mv.first_coord + k] = mv.complex ? real_embedding(e) : RealMatrix(e.real());
            }
            raw.push_back(std::move(rb));
        }
        for (const auto &lmi : problem.lmis())
        {
            bool is_complex = lmi.expr.constant.imag().cwiseAbs().maxCoeff() > 0.0;
            for (const auto &[k, t] : lmi.expr.terms)
                is_complex = is_complex || t.imag().cwiseAbs().maxCoeff() > 0.0;
            auto embed = [&](const ComplexMatrix &h) -> RealMatrix
            {
                ComplexMatrix hs = 0.5 * (h + h.adjoint());
                return is_complex ? real_embedding(hs) : RealMatrix(hs.real());
            };
            const auto n = is_complex ? 2 * lmi.expr.dim() : lmi.expr.dim();
            RawBlock rb{embed(lmi.expr.constant), std::vector<std::optional<RealMatrix>>(m)};
            for (const auto &[k, t] : lmi.expr.terms)
            {
                if (rb.a[k])
                    *rb.a[k] += embed(t);
                else
                    rb.a[k] = embed(t);
            }
            (void)n;
            raw.push_back(std::move(rb));
        }

        // ---- objective and equalities --------------------------------------
        const double sense_sign = problem.sense() == Sense::minimize ? 1.0 : -1.0;
        RealVector cvec = RealVector::Zero(m);
        for (const auto &[k, v] : problem.objective().terms)
            cvec(k) += sense_sign * v;
        double c0 = sense_sign * problem.objective().constant;

        const int p = static_cast<int>(problem.equalities().size());
        RealMatrix g = RealMatrix::Zero(p, m);
        RealVector gv(p);
        for (int r = 0; r < p; ++r)
        {
            const auto &eq = problem.equalities()[r];
            for (const auto &[k, v] : eq.lhs.terms)
                g(r, k) += v;
            gv(r) = eq.rhs - eq.lhs.constant;
        }

        // ---- eliminate equalities: y = y0 + N z ----------------------------
        RealVector y0 = RealVector::Zero(m);
        RealMatrix null_basis;
        std::vector<int> free_cols;
        if (p > 0)
        {
            Eigen::FullPivLU<RealMatrix> lu(g);
            lu.setThreshold(1e-12);
            const int rank = static_cast<int>(lu.rank());
            std::vector<int> basic;
            std::vector<char> is_basic(m, 0);
            for (int i = 0; i < rank; ++i)
            {
                const int col = lu.permutationQ().indices()(i);
                basic.push_back(col);
                is_basic[col] = 1;
            }
            for (int k = 0; k < m; ++k)
                if (!is_basic[k])
                    free_cols.push_back(k);
            RealMatrix gb(p, rank), gf(p, static_cast<int>(free_cols.size()));
            for (int i = 0; i < rank; ++i)
                gb.col(i) = g.col(basic[i]);
            for (std::size_t i = 0; i < free_cols.size(); ++i)
                gf.col(static_cast<Eigen::Index>(i)) = g.col(free_cols[i]);
            Eigen::ColPivHouseholderQR<RealMatrix> qr(gb);
            const RealVector yb = qr.solve(gv);
            const double g_scale = std::max(1.0, gv.norm());
            if ((gb * yb - gv).norm() > 1e-9 * g_scale)
            {
                sol.status = Status::infeasible;
                sol.diagnostic = "equality constraints are inconsistent";
                return sol;
            }
            for (int i = 0; i < rank; ++i)
                y0(basic[i]) = yb(i);
            const RealMatrix xb = qr.solve(gf);
            null_basis = RealMatrix::Zero(m, static_cast<Eigen::Index>(free_cols.size()));
            for (std::size_t j = 0; j < free_cols.size(); ++j)
            {
                null_basis(free_cols[j], static_cast<Eigen::Index>(j)) = 1.0;
                for (int i = 0; i < rank; ++i)
                    null_basis(basic[i], static_cast<Eigen::Index>(j)) = -xb(i, static_cast<Eigen::Index>(j));
            }
        }
        else
        {
            null_basis = RealMatrix::Identity(m, m);
            for (int k = 0; k < m; ++k)
                free_cols.push_back(k);
        }
        const int nz = static_cast<int>(null_basis.cols());

        // reduced objective and blocks
        RealVector cz = null_basis.transpose() * cvec;
        c0 += cvec.dot(y0);

        std::vector<RealMatrix> const_blocks;
        std::vector<std::vector<std::pair<int, RealMatrix>>> reduced(raw.size());
        for (std::size_t bi = 0; bi < raw.size(); ++bi)
        {
            RealMatrix cb = raw[bi].c;
            for (int k = 0; k < m; ++k)
                if (raw[bi].a[k] && y0(k) != 0.0)
                    cb += y0(k) * *raw[bi].a[k];
            const_blocks.push_back(cb);
            for (int j = 0; j < nz; ++j)
            {
                RealMatrix acc;
                bool any = false;
                for (int k = 0; k < m; ++k)
                {
                    const double w = null_basis(k, j);
                    if (w == 0.0 || !raw[bi].a[k])
                        continue;
                    if (!any)
                    {
                        acc = w * *raw[bi].a[k];
                        any = true;
                    }
                    else
                        acc += w * *raw[bi].a[k];
                }
                if (any && acc.cwiseAbs().maxCoeff() > 0.0)
                    reduced[bi].emplace_back(j, std::move(acc));
            }
        }

        // ---- normalization -------------------------------------------------
        RealVector col_norm = RealVector::Zero(nz);
        for (const auto &blk : reduced)
            for (const auto &[j, a] : blk)
                col_norm(j) += a.squaredNorm();
        std::vector<int> active;    // reduced var -> internal index
        std::vector<int> to_active(nz, -1);
        for (int j = 0; j < nz; ++j)
        {
            if (col_norm(j) > 0.0)
            {
                to_active[j] = static_cast<int>(active.size());
                active.push_back(j);
            }
            else if (std::abs(cz(j)) > 0.0)
            {
                sol.status = Status::numerical_failure;
                sol.diagnostic = "objective unbounded along an unconstrained direction";
                return sol;
            }
        }
        const int mi = static_cast<int>(active.size());
        RealVector var_scale(nz);
        for (int j = 0; j < nz; ++j)
            var_scale(j) = col_norm(j) > 0.0 ? 1.0 / std::sqrt(col_norm(j)) : 0.0;

        double c_norm2 = 0.0;
        for (const auto &cb : const_blocks)
            c_norm2 += cb.squaredNorm();
        const double c_scale = c_norm2 > 0.0 ? std::sqrt(c_norm2) : 1.0;
        double b_scale = 0.0;
        for (int j : active)
            b_scale = std::max(b_scale, std::abs(cz(j) * var_scale(j)));
        if (b_scale == 0.0)
            b_scale = 1.0;

        StandardForm sf;
        sf.m = mi;
        sf.b.resize(mi);
        for (int a = 0; a < mi; ++a)
            sf.b(a) = cz(active[a]) * var_scale(active[a]) / b_scale;
        for (std::size_t bi = 0; bi < raw.size(); ++bi)
        {
            Block blk;
            blk.c = const_blocks[bi] / c_scale;
            for (auto &[j, a] : reduced[bi])
                blk.a.emplace_back(to_active[j], a * var_scale(j));
            sf.blocks.push_back(std::move(blk));
        }

        if (mi == 0)
        {
            // Nothing to optimize: check feasibility of the constant point
            bool feasible = true;
            for (const auto &cb : const_blocks)
                if (Eigen::SelfAdjointEigenSolver<RealMatrix>(cb, Eigen::EigenvaluesOnly).eigenvalues()(0) <
                    -opt.tol * std::max(1.0, cb.norm()))
                    feasible = false;
            sol.coordinates = y0;
            sol.status = feasible ? Status::optimal : Status::infeasible;
            sol.objective_value = sense_sign * c0;
            sol.dual_bound = sol.objective_value;
            sol.relative_duality_gap = 0.0;
            sol.primal_infeasibility = sol.dual_infeasibility = 0.0;
        }
        else
        {
            IpmResult r = run_ipm(sf, opt);
            sol.status = r.status;
            sol.diagnostic = r.diagnostic;
            sol.iterations = r.iterations;
            sol.relative_duality_gap = r.gap;
            sol.primal_infeasibility = r.pinf;
            sol.dual_infeasibility = r.dinf;
            // internal y = -w, original reduced var z_j = var_scale_j * c_scale * w_j
            RealVector z = RealVector::Zero(nz);
            for (int a = 0; a < mi; ++a)
                z(active[a]) = -r.y(a) * var_scale(active[a]) * c_scale;
            sol.coordinates = y0 + null_basis * z;
            const double internal_obj = c0 - c_scale * b_scale * r.dobj;
            const double internal_bound = c0 - c_scale * b_scale * r.pobj;
            sol.objective_value = sense_sign * internal_obj;
            sol.dual_bound = sense_sign * internal_bound;
        }

        for (int v = 0; v < static_cast<int>(problem.matrix_variables().size()); ++v)
            sol.matrix_values.push_back(problem.matrix_value(v, sol.coordinates));
        for (const auto &sv : problem.scalar_variables())
            sol.scalar_values.push_back(sol.coordinates(sv.coord));
        // Objective re-evaluated exactly at the returned point
        if (sol.status == Status::optimal)
            sol.objective_value = problem.objective().evaluate(sol.coordinates);
        return sol;
    }

    // Named accessors
    inline const ComplexMatrix &matrix_value(const Problem &p, const Solution &s, const std::string &name)
    {
        for (std::size_t i = 0; i < p.matrix_variables().size(); ++i)
            if (p.matrix_variables()[i].name == name)
                return s.matrix_values.at(i);
        throw std::out_of_range("no matrix variable named " + name);
    }

    inline double scalar_value(const Problem &p, const Solution &s, const std::string &name)
    {
        for (std::size_t i = 0; i < p.scalar_variables().size(); ++i)
            if (p.scalar_variables()[i].name == name)
                return s.scalar_values.at(i);
        throw std::out_of_range("no scalar variable named " + name);
    }
}

#endif
