#include "ddae/interconnect.hpp"

#include "ddae/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace ddae {

TemplateTerm ControllerTemplate::free_term(double delay, int rows, int cols) {
    TemplateTerm t;
    t.delay = delay;
    t.value = Mat::Zero(rows, cols);
    t.free = Mat::Ones(rows, cols);
    return t;
}

TemplateTerm ControllerTemplate::frozen_term(double delay, const Mat& value) {
    TemplateTerm t;
    t.delay = delay;
    t.value = value;
    t.free = Mat::Zero(value.rows(), value.cols());
    return t;
}

namespace {

void check_series(const DelayTermSeries& s, int rows, int cols, const char* name) {
    std::set<double> seen;
    for (const DelayTerm& t : s) {
        if (t.matrix.rows() != rows || t.matrix.cols() != cols) {
            std::ostringstream os;
            os << name << " term must be " << rows << "x" << cols;
            throw DimensionMismatch(os.str());
        }
        if (t.delay < 0.0) throw NonpositiveDelay("term delays must be nonnegative");
        if (!seen.insert(t.delay).second)
            throw DimensionMismatch(std::string(name) + ": duplicate delay within one series");
    }
}

void check_template_series(const TemplateSeries& s, int rows, int cols, const char* name,
                           bool positive_delays_only = false) {
    std::set<double> seen;
    for (const TemplateTerm& t : s) {
        if (t.value.rows() != rows || t.value.cols() != cols ||
            t.free.rows() != rows || t.free.cols() != cols) {
            std::ostringstream os;
            os << name << " term must be " << rows << "x" << cols;
            throw DimensionMismatch(os.str());
        }
        if (t.delay < 0.0 || (positive_delays_only && t.delay == 0.0))
            throw NonpositiveDelay(std::string(name) + ": delay must be " +
                                   (positive_delays_only ? "strictly positive" : "nonnegative"));
        if (!seen.insert(t.delay).second)
            throw DimensionMismatch(std::string(name) + ": duplicate delay within one series");
    }
}

bool any_delayed(const DelayTermSeries& s) {
    for (const DelayTerm& t : s)
        if (t.delay > 0.0) return true;
    return false;
}

}  // namespace

ParamClosedLoop assemble(const PlantSpec& plant, const ControllerTemplate& ctrl) {
    const int nG = plant.nG, nw = plant.nw, nu = plant.nu, ny = plant.ny, nz = plant.nz;
    const int nK = ctrl.nK;
    if (nG < 0 || nw < 0 || nu < 0 || ny < 0 || nz < 0 || nK < 0)
        throw DimensionMismatch("negative dimension");

    check_series(plant.A, nG, nG, "A");
    check_series(plant.B1, nG, nw, "B1");
    check_series(plant.B2, nG, nu, "B2");
    check_series(plant.C1, nz, nG, "C1");
    check_series(plant.D11, nz, nw, "D11");
    check_series(plant.D12, nz, nu, "D12");
    check_series(plant.C2, ny, nG, "C2");
    check_series(plant.D21, ny, nw, "D21");
    check_series(plant.D22, ny, nu, "D22");
    check_template_series(ctrl.AK, nK, nK, "AK");
    check_template_series(ctrl.BK, nK, ny, "BK");
    check_template_series(ctrl.CK, nu, nK, "CK");
    check_template_series(ctrl.DK, nu, ny, "DK");
    check_template_series(ctrl.DKu, nu, nu, "DKu", /*positive_delays_only=*/true);
    if (plant.E.size() != 0 && (plant.E.rows() != nG || plant.E.cols() != nG))
        throw DimensionMismatch("plant E must be nG x nG");

    const bool has_wslack = !plant.D11.empty() || !plant.D21.empty() || any_delayed(plant.B1);
    const bool z_delayed = any_delayed(plant.C1) || any_delayed(plant.D12) || any_delayed(plant.D11);
    const bool w_delayed_read = any_delayed(plant.B1) || any_delayed(plant.D11) || any_delayed(plant.D21);
    const int ngw = has_wslack ? nw : 0;
    const int ngz = z_delayed ? nz : 0;

    ParamClosedLoop pcl;
    pcl.nG = nG;
    pcl.nK = nK;
    pcl.nu = nu;
    pcl.ny = ny;
    pcl.ngw = ngw;
    pcl.ngz = ngz;
    const int oG = 0;
    const int oK = pcl.off_K = nG;
    const int ou = pcl.off_u = nG + nK;
    const int oy = pcl.off_y = ou + nu;
    const int ow = pcl.off_w = oy + ny;
    const int oz = pcl.off_z = ow + ngw;
    const int n = oz + ngz;

    // distinct delays across plant and controller (exact equality)
    std::set<double> dset;
    auto collect = [&dset](const DelayTermSeries& s) {
        for (const DelayTerm& t : s)
            if (t.delay > 0.0) dset.insert(t.delay);
    };
    auto collect_t = [&dset](const TemplateSeries& s) {
        for (const TemplateTerm& t : s)
            if (t.delay > 0.0) dset.insert(t.delay);
    };
    collect(plant.A); collect(plant.B1); collect(plant.B2);
    collect(plant.C1); collect(plant.D11); collect(plant.D12);
    collect(plant.C2); collect(plant.D21); collect(plant.D22);
    collect_t(ctrl.AK); collect_t(ctrl.BK); collect_t(ctrl.CK);
    collect_t(ctrl.DK); collect_t(ctrl.DKu);

    DdaeSystem sys;
    sys.n = n;
    sys.delays.assign(dset.begin(), dset.end());
    std::map<double, int> dmap;
    dmap[0.0] = 0;
    for (std::size_t i = 0; i < sys.delays.size(); ++i) dmap[sys.delays[i]] = static_cast<int>(i) + 1;

    sys.A.assign(sys.delays.size() + 1, Mat::Zero(n, n));
    sys.B = Mat::Zero(n, nw);
    sys.C = Mat::Zero(nz, n);
    sys.E = Mat::Zero(n, n);
    sys.E.topLeftCorner(nG, nG) = plant.E.size() == 0 ? Mat::Identity(nG, nG) : plant.E;
    sys.E.block(oK, oK, nK, nK).setIdentity();

    auto put = [&](const DelayTermSeries& s, int r, int c, double sign) {
        for (const DelayTerm& t : s)
            sys.A[static_cast<std::size_t>(dmap[t.delay])].block(r, c, t.matrix.rows(), t.matrix.cols()) +=
                sign * t.matrix;
    };

    // plant state rows
    put(plant.A, oG, oG, 1.0);
    put(plant.B2, oG, ou, 1.0);
    if (has_wslack && w_delayed_read) {
        put(plant.B1, oG, ow, 1.0);
    } else {
        for (const DelayTerm& t : plant.B1) sys.B.block(oG, 0, nG, nw) += t.matrix;
    }
    // u slack row: 0 = u - (CK xK + DK y + DKu u), following the standard display
    sys.A[0].block(ou, ou, nu, nu) += Mat::Identity(nu, nu);
    // y slack row: 0 = C2 xG + D21 w + D22 u - y
    sys.A[0].block(oy, oy, ny, ny) -= Mat::Identity(ny, ny);
    put(plant.C2, oy, oG, 1.0);
    put(plant.D22, oy, ou, 1.0);
    if (!plant.D21.empty()) put(plant.D21, oy, ow, 1.0);
    // w slack row: 0 = -gw + w
    if (has_wslack) {
        sys.A[0].block(ow, ow, nw, nw) -= Mat::Identity(nw, nw);
        sys.B.block(ow, 0, nw, nw) += Mat::Identity(nw, nw);
    }
    // z slack row and output map
    if (z_delayed) {
        sys.A[0].block(oz, oz, nz, nz) -= Mat::Identity(nz, nz);
        for (const DelayTerm& t : plant.C1) {
            if (t.delay > 0.0)
                sys.A[static_cast<std::size_t>(dmap[t.delay])].block(oz, oG, nz, nG) += t.matrix;
            else
                sys.C.block(0, oG, nz, nG) += t.matrix;
        }
        put(plant.D12, oz, ou, 1.0);
        if (!plant.D11.empty()) put(plant.D11, oz, ow, 1.0);
        sys.C.block(0, oz, nz, nz) += Mat::Identity(nz, nz);
    } else {
        for (const DelayTerm& t : plant.C1) sys.C.block(0, oG, nz, nG) += t.matrix;
        for (const DelayTerm& t : plant.D12) sys.C.block(0, ou, nz, nu) += t.matrix;
        for (const DelayTerm& t : plant.D11) sys.C.block(0, ow, nz, nw) += t.matrix;
    }

    // controller terms: frozen entries into the base, free entries become
    // parameters. Enumeration: AK, BK, CK, DK, DKu; series order; row-major.
    auto place_template = [&](const TemplateSeries& s, int r0, int c0, double sign) {
        for (const TemplateTerm& t : s) {
            const int di = dmap[t.delay];
            for (int r = 0; r < t.value.rows(); ++r) {
                for (int c = 0; c < t.value.cols(); ++c) {
                    if (t.free(r, c) != 0.0) {
                        pcl.jac.push_back({{di, r0 + r, c0 + c, sign}});
                    } else {
                        sys.A[static_cast<std::size_t>(di)](r0 + r, c0 + c) += sign * t.value(r, c);
                    }
                }
            }
        }
    };
    place_template(ctrl.AK, oK, oK, 1.0);
    place_template(ctrl.BK, oK, oy, 1.0);
    place_template(ctrl.CK, ou, oK, -1.0);
    place_template(ctrl.DK, ou, oy, -1.0);
    place_template(ctrl.DKu, ou, ou, -1.0);

    pcl.base = std::move(sys);

    // algebraic-loop screen at the reference parameters (p0 or zero)
    Vec pref = ctrl.p0;
    if (pref.size() == 0) pref = Vec::Zero(pcl.param_count());
    if (pref.size() != pcl.param_count())
        throw DimensionMismatch("p0 length does not match the number of free entries");
    try {
        validate(instantiate(pcl, pref));
    } catch (const AssumptionOneViolated& e) {
        throw AlgebraicLoop(std::string("algebraic loop: U^T A0 V singular at the reference parameters (") +
                            e.what() + ")");
    }
    return pcl;
}

DdaeSystem instantiate(const ParamClosedLoop& pcl, const Vec& p) {
    if (p.size() != pcl.param_count())
        throw DimensionMismatch("parameter vector length mismatch");
    DdaeSystem sys = pcl.base;
    for (int k = 0; k < pcl.param_count(); ++k)
        for (const JacEntry& e : pcl.jac[static_cast<std::size_t>(k)])
            sys.A[static_cast<std::size_t>(e.delay_index)](e.row, e.col) += p(k) * e.coeff;
    return sys;
}

std::vector<Mat> parameter_jacobian(const ParamClosedLoop& pcl, int k) {
    if (k < 0 || k >= pcl.param_count()) throw IndexOutOfRange("parameter index out of range");
    std::vector<Mat> out(pcl.base.A.size(), Mat::Zero(pcl.base.n, pcl.base.n));
    for (const JacEntry& e : pcl.jac[static_cast<std::size_t>(k)])
        out[static_cast<std::size_t>(e.delay_index)](e.row, e.col) += e.coeff;
    return out;
}

}  // namespace ddae
