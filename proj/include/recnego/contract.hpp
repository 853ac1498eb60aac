#pragma once

#include <cmath>
#include <vector>

#include "recnego/errors.hpp"

namespace recnego {

/// An energy loan offer: q kWh exchanged at the negotiation period, returned
/// return_delay periods later. Positive q means the side holding this value
/// exports the energy first; the counterparty sees the negated quantity.
struct EnergyContract {
    double quantity_kwh = 0.0;
    int return_delay = 2;

    EnergyContract mirrored() const { return {-quantity_kwh, return_delay}; }
    bool is_no_deal() const { return quantity_kwh == 0.0; }

    friend bool operator==(const EnergyContract& a, const EnergyContract& b) {
        return a.quantity_kwh == b.quantity_kwh && a.return_delay == b.return_delay;
    }
};

/// The outcome space Omega = Q x T. Q is a symmetric grid of discrete energy
/// volumes including 0 (the no-deal contract); T is a contiguous range of
/// return delays. Quantities are built so that negation maps the grid onto
/// itself bit-exactly, which keeps mirrored offers inside the domain.
class NegotiationDomain {
public:
    NegotiationDomain(int quantity_levels, double max_quantity_kwh, int delay_min, int delay_max) {
        if (quantity_levels < 1)
            throw ArgumentError("NegotiationDomain: quantity_levels must be >= 1");
        if (quantity_levels % 2 == 0)
            throw ArgumentError("NegotiationDomain: quantity_levels must be odd so Q contains 0");
        if (max_quantity_kwh < 0.0)
            throw ArgumentError("NegotiationDomain: max_quantity_kwh must be >= 0");
        if (delay_min < 2 || delay_max < delay_min)
            throw ArgumentError("NegotiationDomain: need 2 <= delay_min <= delay_max");
        const int half = (quantity_levels - 1) / 2;
        quantities_.reserve(quantity_levels);
        for (int k = 0; k < quantity_levels; ++k) {
            // (k - half)/half in {-1,...,1}; exact negation symmetry by IEEE sign flip
            quantities_.push_back(half == 0 ? 0.0 : max_quantity_kwh * (k - half) / half);
        }
        delay_min_ = delay_min;
        delay_max_ = delay_max;
    }

    const std::vector<double>& quantities() const { return quantities_; }
    int delay_min() const { return delay_min_; }
    int delay_max() const { return delay_max_; }
    int delay_count() const { return delay_max_ - delay_min_ + 1; }
    int size() const { return static_cast<int>(quantities_.size()) * delay_count(); }

    /// Canonical enumeration order: q ascending (outer), tau ascending (inner).
    EnergyContract contract_at(int flat) const {
        const int nt = delay_count();
        return {quantities_[static_cast<std::size_t>(flat / nt)], delay_min_ + flat % nt};
    }

    /// Flat index of the mirrored contract (-q, tau). The grid is symmetric,
    /// so mirroring is an exact index flip.
    int mirror_index(int flat) const {
        const int nt = delay_count();
        const int nq = static_cast<int>(quantities_.size());
        return (nq - 1 - flat / nt) * nt + flat % nt;
    }

    /// Flat index of a contract, or -1 when it is not a domain member.
    /// Quantity matching is exact: offers travel between agents as grid values.
    int index_of(const EnergyContract& c) const {
        if (c.return_delay < delay_min_ || c.return_delay > delay_max_) return -1;
        for (std::size_t iq = 0; iq < quantities_.size(); ++iq) {
            if (quantities_[iq] == c.quantity_kwh)
                return static_cast<int>(iq) * delay_count() + (c.return_delay - delay_min_);
        }
        return -1;
    }

    friend bool operator==(const NegotiationDomain& a, const NegotiationDomain& b) {
        return a.quantities_ == b.quantities_ && a.delay_min_ == b.delay_min_ && a.delay_max_ == b.delay_max_;
    }

private:
    std::vector<double> quantities_;
    int delay_min_;
    int delay_max_;
};

/// Normalized preference weights over the two criteria.
struct CriterionWeights {
    double w_flex = 0.5;     // lambda_c1, loss in flexibility
    double w_autarky = 0.5;  // lambda_c2, autarky

    void validate() const {
        if (w_flex < 0.0 || w_autarky < 0.0)
            throw ArgumentError("CriterionWeights: weights must be non-negative");
        if (std::abs(w_flex + w_autarky - 1.0) > 1e-9)
            throw ArgumentError("CriterionWeights: weights must sum to 1");
    }
};

}  // namespace recnego
