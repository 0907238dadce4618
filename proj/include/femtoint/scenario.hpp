#pragma once

// System-model parameterization: Manhattan grid with a victim femto-cell at a
// crossing, vehicular uplink transmitters on the streets, and the two-slope
// pathloss l(x1, x2) = C x1^-2 x2^-alpha.
//
// All power quantities are linear milliwatts internally. dB/dBm values are
// converted once, where the configuration is read.

#include <cmath>
#include <string>

#include "femtoint/errors.hpp"

namespace femtoint {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

struct GridGeometry {
    double block_side = 50.0;    // d [m]
    double street_width = 20.0;  // r [m]
    double window_side = 2000.0; // simulated square, centered on the crossing [m]

    /// D = d + r, distance between neighbouring parallel streets.
    double street_spacing() const { return block_side + street_width; }

    /// Highest street index k with k*D inside the half-window.
    int last_street_in_window() const
    {
        return static_cast<int>(std::floor(window_side / (2.0 * street_spacing())));
    }

    void validate() const
    {
        if (!(block_side > 0.0))
            throw domain_error("grid: block_side must be > 0");
        if (!(street_width > 0.0))
            throw domain_error("grid: street_width must be > 0");
        if (!(window_side >= 2.0 * street_spacing()))
            throw domain_error("grid: window_side must be >= 2 * street spacing");
    }
};

struct RadioParams {
    double tx_power_mw = 100.0;          // P_t
    double pathloss_exponent = 4.0;      // alpha, NLOS
    double attenuation_constant = 1e-3;  // C0, linear
    double wall_loss_db = 15.0;
    double isolation_db = 0.0;           // car body isolation eta

    /// C = C0 * wall loss * isolation, linear.
    double gain_constant() const
    {
        return attenuation_constant * db_to_linear(-wall_loss_db) * db_to_linear(-isolation_db);
    }

    void validate() const
    {
        if (!(tx_power_mw >= 0.0))
            throw domain_error("radio: tx_power must be >= 0 mW");
        if (!(pathloss_exponent >= 3.0))
            throw domain_error("radio: alpha must be >= 3 (zeta(alpha/2) must converge)");
        if (!(attenuation_constant > 0.0))
            throw domain_error("radio: attenuation_constant must be > 0");
    }
};

/// z = P_t * C [mW]. Zero transmit power gives zero interference.
inline double composite_gain(const RadioParams& radio)
{
    return radio.tx_power_mw * radio.gain_constant();
}

struct TrafficParams {
    double density = 0.1; // active uplink transmitters per metre, same on every street

    void validate() const
    {
        if (!(density >= 0.0))
            throw domain_error("traffic: lambda must be >= 0");
    }
};

struct FemtoParams {
    int nakagami_m = 1;
    double mean_rx_power_mw = 1e-4; // -40 dBm
    double sir_target = 31.622776601683793; // 15 dB

    /// Scale of the Gamma-distributed wanted power, P_rx ~ Gamma(m, theta).
    double theta() const { return mean_rx_power_mw / nakagami_m; }

    void validate() const
    {
        if (nakagami_m < 1)
            throw domain_error("femto: nakagami_m must be an integer >= 1");
        if (!(mean_rx_power_mw > 0.0))
            throw domain_error("femto: mean_rx_power must be > 0");
        if (!(sir_target > 0.0))
            throw domain_error("femto: sir_target must be > 0");
    }
};

enum class PathlossVariant { Singular, NonSingular };

inline std::string to_string(PathlossVariant v)
{
    return v == PathlossVariant::Singular ? "singular" : "nonsingular";
}

struct PathlossModel {
    PathlossVariant variant = PathlossVariant::NonSingular;
    bool include_horizontal = false; // horizontal streets double the exposure
};

struct ScenarioConfig {
    GridGeometry grid;
    RadioParams radio;
    TrafficParams traffic;
    FemtoParams femto;

    double composite_gain() const { return femtoint::composite_gain(radio); }

    void validate() const
    {
        grid.validate();
        radio.validate();
        traffic.validate();
        femto.validate();
    }
};

/// LOS distance of street k. The facing street (k = 0) sits at x2 = 1 by
/// convention: it is a normalization of the model, not a physical distance.
inline double street_los_distance(const GridGeometry& grid, int k)
{
    if (k < 0)
        throw domain_error("street index must be >= 0");
    return k == 0 ? 1.0 : k * grid.street_spacing();
}

/// beta_k = x_{2,k}^alpha.
inline double beta_k(const GridGeometry& grid, double alpha, int k)
{
    return std::pow(street_los_distance(grid, k), alpha);
}

/// l(x1, x2) = C x1^-2 x2^-alpha. NonSingular evaluates at max(x1, 1).
inline double pathloss(double x1, double x2, const RadioParams& radio, const PathlossModel& model)
{
    if (!(x1 > 0.0) || !(x2 >= 1.0))
        throw domain_error("pathloss: requires x1 > 0 and x2 >= 1");
    if (model.variant == PathlossVariant::NonSingular && x1 < 1.0)
        x1 = 1.0;
    return radio.gain_constant() / (x1 * x1) * std::pow(x2, -radio.pathloss_exponent);
}

} // namespace femtoint
