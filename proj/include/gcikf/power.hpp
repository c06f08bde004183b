// IEEE-style bus/branch network model for forecasting-aided state
// estimation: polar power-flow measurement functions, analytic Jacobian,
// and a versioned JSON network schema.
//
// State layout: x = [a_2 .. a_L, V_1 .. V_L], dimension 2L-1.  The angle of
// bus 1 is the reference and is held at its data-file value.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gcikf/model.hpp"

namespace gcikf {

struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct UnknownMeasurementLocation : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

struct Bus {
    int id = 0;
    enum class Type { Slack, PV, PQ };
    Type type = Type::PQ;
    double v_init = 1.0;
    double angle_init = 0.0; // radians
    double gs = 0.0;         // bus shunt conductance (p.u.)
    double bs = 0.0;         // bus shunt susceptance (p.u.)
};

struct Branch {
    int from = 0;
    int to = 0;
    double r = 0.0;
    double x = 0.0;
    double b = 0.0;   // total line charging susceptance
    double tap = 1.0; // off-nominal turns ratio at the from side
};

struct MeasurementSpec {
    enum class Kind { Vmag, Pinj, Qinj, Pflow, Qflow };
    Kind kind = Kind::Vmag;
    int bus = 0;  // Vmag/Pinj/Qinj
    int from = 0; // Pflow/Qflow
    int to = 0;
};

class PowerNetwork {
  public:
    PowerNetwork(std::vector<Bus> buses, std::vector<Branch> branches,
                 std::vector<MeasurementSpec> plan)
        : buses_(std::move(buses)), branches_(std::move(branches)), plan_(std::move(plan)) {
        validate_topology();
        build_admittance();
        if (plan_.empty()) plan_ = default_plan();
        validate_plan();
    }

    int bus_count() const { return static_cast<int>(buses_.size()); }
    int state_dim() const { return 2 * bus_count() - 1; }
    int meas_dim() const { return static_cast<int>(plan_.size()); }
    const std::vector<MeasurementSpec>& plan() const { return plan_; }
    const std::vector<Branch>& branches() const { return branches_; }
    const Mat& G() const { return G_; }
    const Mat& B() const { return B_; }
    double reference_angle() const { return buses_.front().angle_init; }

    /// Base-case bus voltages from the data file, as a state vector.
    Vec true_initial_state() const {
        const int L = bus_count();
        Vec x(state_dim());
        for (int i = 1; i < L; ++i) x(i - 1) = buses_[i].angle_init;
        for (int i = 0; i < L; ++i) x(L - 1 + i) = buses_[i].v_init;
        return x;
    }

    /// Flat start: all angles at the reference, all magnitudes 1.
    Vec flat_start_state() const {
        const int L = bus_count();
        Vec x = Vec::Zero(state_dim());
        for (int i = 1; i < L; ++i) x(i - 1) = reference_angle();
        for (int i = 0; i < L; ++i) x(L - 1 + i) = 1.0;
        return x;
    }

    /// Evaluate the measurement plan at state x.
    Vec h(const Vec& x) const {
        check_state(x);
        Vec z(meas_dim());
        for (int r = 0; r < meas_dim(); ++r) z(r) = eval_one(plan_[r], x);
        return z;
    }

    /// Analytic measurement Jacobian, one row per plan entry.
    Mat h_jacobian(const Vec& x) const {
        check_state(x);
        Mat H = Mat::Zero(meas_dim(), state_dim());
        for (int r = 0; r < meas_dim(); ++r) fill_row(plan_[r], x, H, r);
        return H;
    }

    /// Model functions hold a shared copy of the network, so the returned
    /// StateSpaceModel stays valid after this object goes away.
    StateSpaceModel system() const {
        auto net = std::make_shared<PowerNetwork>(*this);
        StateSpaceModel m;
        m.state_dim = state_dim();
        m.meas_dim = meas_dim();
        m.f = [](const Vec& x) { return x; }; // random-walk state model
        m.f_jacobian = [n = state_dim()](const Vec&) { return Mat::Identity(n, n); };
        m.h = [net](const Vec& x) { return net->h(x); };
        m.h_jacobian = [net](const Vec& x) { return net->h_jacobian(x); };
        m.W = Mat::Identity(state_dim(), state_dim()) * 1e-6;
        m.V = Mat::Identity(meas_dim(), meas_dim());
        return m;
    }

  private:
    std::vector<Bus> buses_;
    std::vector<Branch> branches_;
    std::vector<MeasurementSpec> plan_;
    Mat G_, B_;
    std::map<int, int> index_; // bus id -> 0-based index

    void validate_topology() {
        if (buses_.size() < 2) throw ValidationError("network: need at least 2 buses");
        std::set<int> ids;
        for (const auto& b : buses_) {
            if (!ids.insert(b.id).second)
                throw ValidationError("network: duplicate bus id " + std::to_string(b.id));
        }
        std::sort(buses_.begin(), buses_.end(),
                  [](const Bus& a, const Bus& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < buses_.size(); ++i)
            index_[buses_[i].id] = static_cast<int>(i);

        std::set<std::pair<int, int>> seen;
        for (const auto& br : branches_) {
            if (!index_.count(br.from) || !index_.count(br.to))
                throw ValidationError("network: branch references unknown bus " +
                                      std::to_string(index_.count(br.from) ? br.to : br.from));
            auto key = std::minmax(br.from, br.to);
            if (!seen.insert(key).second)
                throw ValidationError("network: duplicate branch " + std::to_string(br.from) +
                                      "-" + std::to_string(br.to));
            if (br.r == 0.0 && br.x == 0.0)
                throw ValidationError("network: branch with zero impedance");
            if (!(br.tap > 0.0)) throw ValidationError("network: tap must be positive");
        }

        // connectivity
        std::set<int> reached;
        std::queue<int> q;
        q.push(buses_.front().id);
        reached.insert(buses_.front().id);
        while (!q.empty()) {
            int cur = q.front();
            q.pop();
            for (const auto& br : branches_) {
                int other = -1;
                if (br.from == cur) other = br.to;
                else if (br.to == cur) other = br.from;
                if (other >= 0 && !reached.count(other)) {
                    reached.insert(other);
                    q.push(other);
                }
            }
        }
        if (reached.size() != buses_.size())
            throw ValidationError("network: not connected (" + std::to_string(reached.size()) +
                                  " of " + std::to_string(buses_.size()) + " buses reachable)");
    }

    void build_admittance() {
        const int L = bus_count();
        G_ = Mat::Zero(L, L);
        B_ = Mat::Zero(L, L);
        for (const auto& br : branches_) {
            const int i = index_.at(br.from);
            const int j = index_.at(br.to);
            const double den = br.r * br.r + br.x * br.x;
            const double g = br.r / den;
            const double b = -br.x / den;
            const double a = br.tap;
            G_(i, i) += g / (a * a);
            B_(i, i) += (b + br.b / 2.0) / (a * a);
            G_(j, j) += g;
            B_(j, j) += b + br.b / 2.0;
            G_(i, j) -= g / a;
            B_(i, j) -= b / a;
            G_(j, i) -= g / a;
            B_(j, i) -= b / a;
        }
        for (int i = 0; i < L; ++i) {
            G_(i, i) += buses_[i].gs;
            B_(i, i) += buses_[i].bs;
        }
    }

    std::vector<MeasurementSpec> default_plan() const {
        // Voltage magnitude everywhere plus P/Q injections at every
        // non-reference bus.
        std::vector<MeasurementSpec> plan;
        for (const auto& b : buses_)
            plan.push_back({MeasurementSpec::Kind::Vmag, b.id, 0, 0});
        for (std::size_t i = 1; i < buses_.size(); ++i)
            plan.push_back({MeasurementSpec::Kind::Pinj, buses_[i].id, 0, 0});
        for (std::size_t i = 1; i < buses_.size(); ++i)
            plan.push_back({MeasurementSpec::Kind::Qinj, buses_[i].id, 0, 0});
        return plan;
    }

    void validate_plan() const {
        for (const auto& m : plan_) {
            if (m.kind == MeasurementSpec::Kind::Vmag || m.kind == MeasurementSpec::Kind::Pinj ||
                m.kind == MeasurementSpec::Kind::Qinj) {
                if (!index_.count(m.bus))
                    throw UnknownMeasurementLocation("measurement at unknown bus " +
                                                     std::to_string(m.bus));
            } else {
                if (!index_.count(m.from) || !index_.count(m.to))
                    throw UnknownMeasurementLocation("flow measurement on unknown pair " +
                                                     std::to_string(m.from) + "-" +
                                                     std::to_string(m.to));
                if (!find_branch(m.from, m.to))
                    throw UnknownMeasurementLocation("flow measurement on missing branch " +
                                                     std::to_string(m.from) + "-" +
                                                     std::to_string(m.to));
            }
        }
    }

    const Branch* find_branch(int from, int to) const {
        for (const auto& br : branches_)
            if (br.from == from && br.to == to) return &br;
        return nullptr;
    }

    void check_state(const Vec& x) const {
        if (x.size() != state_dim())
            throw DimensionMismatch("power state has wrong dimension: " +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(state_dim()));
    }

    double angle_of(const Vec& x, int idx) const {
        return idx == 0 ? reference_angle() : x(idx - 1);
    }
    double vmag_of(const Vec& x, int idx) const { return x(bus_count() - 1 + idx); }

    double eval_one(const MeasurementSpec& m, const Vec& x) const {
        const int L = bus_count();
        switch (m.kind) {
            case MeasurementSpec::Kind::Vmag:
                return vmag_of(x, index_.at(m.bus));
            case MeasurementSpec::Kind::Pinj: {
                const int i = index_.at(m.bus);
                const double vi = vmag_of(x, i);
                const double ti = angle_of(x, i);
                double p = 0.0;
                for (int l = 0; l < L; ++l) {
                    const double th = ti - angle_of(x, l);
                    p += vmag_of(x, l) * (G_(i, l) * std::cos(th) + B_(i, l) * std::sin(th));
                }
                return vi * p;
            }
            case MeasurementSpec::Kind::Qinj: {
                const int i = index_.at(m.bus);
                const double vi = vmag_of(x, i);
                const double ti = angle_of(x, i);
                double q = 0.0;
                for (int l = 0; l < L; ++l) {
                    const double th = ti - angle_of(x, l);
                    q += vmag_of(x, l) * (G_(i, l) * std::sin(th) - B_(i, l) * std::cos(th));
                }
                return vi * q;
            }
            case MeasurementSpec::Kind::Pflow:
            case MeasurementSpec::Kind::Qflow: {
                const Branch* br = find_branch(m.from, m.to);
                const int i = index_.at(m.from);
                const int j = index_.at(m.to);
                const double den = br->r * br->r + br->x * br->x;
                const double g = br->r / den;
                const double b = -br->x / den;
                const double a = br->tap;
                const double vi = vmag_of(x, i), vj = vmag_of(x, j);
                const double th = angle_of(x, i) - angle_of(x, j);
                if (m.kind == MeasurementSpec::Kind::Pflow)
                    return vi * vi * g / (a * a) -
                           (vi * vj / a) * (g * std::cos(th) + b * std::sin(th));
                return -vi * vi * (b + br->b / 2.0) / (a * a) -
                       (vi * vj / a) * (g * std::sin(th) - b * std::cos(th));
            }
        }
        throw Error("power: unreachable measurement kind");
    }

    void fill_row(const MeasurementSpec& m, const Vec& x, Mat& H, int row) const {
        const int L = bus_count();
        auto acol = [&](int busidx) { return busidx - 1; };          // angle column, busidx >= 1
        auto vcol = [&](int busidx) { return L - 1 + busidx; };      // magnitude column

        switch (m.kind) {
            case MeasurementSpec::Kind::Vmag: {
                H(row, vcol(index_.at(m.bus))) = 1.0;
                return;
            }
            case MeasurementSpec::Kind::Pinj:
            case MeasurementSpec::Kind::Qinj: {
                const int i = index_.at(m.bus);
                const double vi = vmag_of(x, i);
                const double ti = angle_of(x, i);
                const double Pi = eval_one({MeasurementSpec::Kind::Pinj, m.bus, 0, 0}, x);
                const double Qi = eval_one({MeasurementSpec::Kind::Qinj, m.bus, 0, 0}, x);
                for (int l = 0; l < L; ++l) {
                    const double vl = vmag_of(x, l);
                    const double th = ti - angle_of(x, l);
                    const double gc = G_(i, l) * std::cos(th) + B_(i, l) * std::sin(th);
                    const double gs = G_(i, l) * std::sin(th) - B_(i, l) * std::cos(th);
                    if (m.kind == MeasurementSpec::Kind::Pinj) {
                        if (l != i) {
                            if (l != 0) H(row, acol(l)) = vi * vl * gs;
                            H(row, vcol(l)) = vi * gc;
                        }
                    } else {
                        if (l != i) {
                            if (l != 0) H(row, acol(l)) = -vi * vl * gc;
                            H(row, vcol(l)) = vi * gs;
                        }
                    }
                }
                if (m.kind == MeasurementSpec::Kind::Pinj) {
                    if (i != 0) H(row, acol(i)) = -Qi - B_(i, i) * vi * vi;
                    H(row, vcol(i)) = Pi / vi + G_(i, i) * vi;
                } else {
                    if (i != 0) H(row, acol(i)) = Pi - G_(i, i) * vi * vi;
                    H(row, vcol(i)) = Qi / vi - B_(i, i) * vi;
                }
                return;
            }
            case MeasurementSpec::Kind::Pflow:
            case MeasurementSpec::Kind::Qflow: {
                const Branch* br = find_branch(m.from, m.to);
                const int i = index_.at(m.from);
                const int j = index_.at(m.to);
                const double den = br->r * br->r + br->x * br->x;
                const double g = br->r / den;
                const double b = -br->x / den;
                const double a = br->tap;
                const double vi = vmag_of(x, i), vj = vmag_of(x, j);
                const double th = angle_of(x, i) - angle_of(x, j);
                const double cs = std::cos(th), sn = std::sin(th);
                if (m.kind == MeasurementSpec::Kind::Pflow) {
                    const double dth = (vi * vj / a) * (g * sn - b * cs);
                    if (i != 0) H(row, acol(i)) = dth;
                    if (j != 0) H(row, acol(j)) = -dth;
                    H(row, vcol(i)) = 2.0 * vi * g / (a * a) - (vj / a) * (g * cs + b * sn);
                    H(row, vcol(j)) = -(vi / a) * (g * cs + b * sn);
                } else {
                    const double dth = -(vi * vj / a) * (g * cs + b * sn);
                    if (i != 0) H(row, acol(i)) = dth;
                    if (j != 0) H(row, acol(j)) = -dth;
                    H(row, vcol(i)) =
                        -2.0 * vi * (b + br->b / 2.0) / (a * a) - (vj / a) * (g * sn - b * cs);
                    H(row, vcol(j)) = -(vi / a) * (g * sn - b * cs);
                }
                return;
            }
        }
    }
};

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const std::string& name, const std::string& ctx) {
    if (!j.contains(name))
        throw ValidationError(ctx + ": missing field '" + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(ctx + ": bad field '" + name + "': " + e.what());
    }
}

} // namespace detail

/// Load a network from the JSON schema (schema_version 1):
/// { "schema_version": 1, "buses": [...], "branches": [...], "measurements": [...] }.
inline PowerNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("load_network: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("load_network: " + path + ": " + e.what());
    }

    std::vector<Bus> buses;
    if (!j.contains("buses") || !j["buses"].is_array() || j["buses"].empty())
        throw ValidationError("load_network: missing or empty 'buses'");
    for (const auto& jb : j["buses"]) {
        Bus b;
        b.id = detail::require_field<int>(jb, "id", "bus");
        const std::string type = jb.value("type", "pq");
        b.type = type == "slack" ? Bus::Type::Slack
                                 : (type == "pv" ? Bus::Type::PV : Bus::Type::PQ);
        b.v_init = detail::require_field<double>(jb, "v", "bus " + std::to_string(b.id));
        b.angle_init = detail::require_field<double>(jb, "angle_deg", "bus " + std::to_string(b.id)) *
                       std::numbers::pi / 180.0;
        b.gs = jb.value("gs", 0.0);
        b.bs = jb.value("bs", 0.0);
        buses.push_back(b);
    }

    std::vector<Branch> branches;
    if (!j.contains("branches") || !j["branches"].is_array())
        throw ValidationError("load_network: missing 'branches'");
    for (const auto& jb : j["branches"]) {
        Branch br;
        br.from = detail::require_field<int>(jb, "from", "branch");
        br.to = detail::require_field<int>(jb, "to", "branch");
        const std::string ctx = "branch " + std::to_string(br.from) + "-" + std::to_string(br.to);
        br.r = detail::require_field<double>(jb, "r", ctx);
        br.x = detail::require_field<double>(jb, "x", ctx);
        br.b = jb.value("b", 0.0);
        br.tap = jb.value("tap", 1.0);
        branches.push_back(br);
    }

    std::vector<MeasurementSpec> plan;
    if (j.contains("measurements")) {
        for (const auto& jm : j["measurements"]) {
            MeasurementSpec m;
            const std::string kind = detail::require_field<std::string>(jm, "kind", "measurement");
            if (kind == "vmag") m.kind = MeasurementSpec::Kind::Vmag;
            else if (kind == "pinj") m.kind = MeasurementSpec::Kind::Pinj;
            else if (kind == "qinj") m.kind = MeasurementSpec::Kind::Qinj;
            else if (kind == "pflow") m.kind = MeasurementSpec::Kind::Pflow;
            else if (kind == "qflow") m.kind = MeasurementSpec::Kind::Qflow;
            else throw ValidationError("measurement: unknown kind '" + kind + "'");
            if (m.kind == MeasurementSpec::Kind::Pflow || m.kind == MeasurementSpec::Kind::Qflow) {
                m.from = detail::require_field<int>(jm, "from", "measurement");
                m.to = detail::require_field<int>(jm, "to", "measurement");
            } else {
                m.bus = detail::require_field<int>(jm, "bus", "measurement");
            }
            plan.push_back(m);
        }
    }

    return PowerNetwork(std::move(buses), std::move(branches), std::move(plan));
}

} // namespace gcikf
