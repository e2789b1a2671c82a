#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal/core.hpp"

namespace nonlocal {

// Disjoint sorted angular intervals in [0, 2 pi).
struct ArcSet {
    std::vector<std::pair<double, double>> arcs;

    static ArcSet full();
    static ArcSet empty() { return {}; }
    // The arc (lo, hi) taken modulo 2 pi; hi - lo >= 2 pi gives the full circle.
    static ArcSet between(double lo, double hi);

    ArcSet operator|(const ArcSet& o) const;
    ArcSet operator&(const ArcSet& o) const;
    ArcSet operator~() const;
    double measure() const;
};

using Interval = std::pair<double, double>;
using IntervalList = std::vector<Interval>;  // disjoint, sorted; endpoints may be infinite

IntervalList normalize(IntervalList v);
IntervalList intersect(const IntervalList& a, const IntervalList& b);
IntervalList complement(const IntervalList& a);
IntervalList subtract(const IntervalList& a, const IntervalList& b);
double length(const IntervalList& a);

// Supergraph {(x, y) : y > u(x)} in the plane.  `far` decides membership of
// r*(cos t, sin t) for r = e^{log_r} too large to form in floating point.
struct GraphData {
    std::string name;
    Fn1 u;
    Fn1 du;
    std::function<bool(double t, double log_r)> far;
    double holder = 1;  // Hoelder exponent of u'
};
GraphData graph_preset(const std::string& name);

struct GeomSet {
    enum Kind { HalfSpace, Ball, Cone2D, Cap, Supergraph, Intervals, Difference, Union, Complement };
    Kind kind = HalfSpace;
    int n = 2;
    Point nu{};       // HalfSpace {y . nu > a}; Cap axis
    double a = 0;     // HalfSpace offset; Cap half-angle
    Point c{};        // Ball centre
    double R = 1;     // Ball radius
    std::vector<std::pair<double, double>> sectors;  // Cone2D angular intervals
    std::shared_ptr<GraphData> graph;
    IntervalList intervals;
    std::shared_ptr<const GeomSet> A, B;

    bool contains(const Point& y) const;
    // Membership of e^{log_r} * dir for unit dir; exact for log_r beyond the
    // floating range as long as every primitive knows its far field.
    bool contains_far(const Point& dir, double log_r) const;
    // Angular set {t : centre + r (cos t, sin t) in E}, n = 2.
    ArcSet arcs(const Point& centre, double r) const;
    // Radii about `centre` where the arc structure changes (n = 2).
    std::vector<double> radial_breaks(const Point& centre) const;
    // Smallest R with E inside B_R(centre); inf when unbounded.
    double bounding_radius(const Point& centre) const;
    // Interval form of a one-dimensional set.
    IntervalList to_intervals() const;
};

GeomSet halfspace(const Point& nu, double a, int n);
GeomSet ball(const Point& c, double R, int n);
GeomSet cone2d(std::vector<std::pair<double, double>> sectors);
GeomSet cap_cone(const Point& axis, double half_angle, int n);
GeomSet supergraph(GraphData g);
GeomSet intervals(IntervalList v);
GeomSet difference(const GeomSet& A, const GeomSet& B);
GeomSet set_union(const GeomSet& A, const GeomSet& B);
GeomSet set_complement(const GeomSet& A);

// Descriptor grammar: halfspace:nu=<v>;a=<r> | ball:c=<v>;R=<r> |
// cone2d:arcs=<t1,t2>[;<t1,t2>...] | graph:<preset> | intervals:<a,b>[;<a,b>...] |
// diff(A,B) | union(A,B) | compl(A) | a named preset (dimple, candy, parabola,
// cubic, tanh, halfplane, exterior-halfplane, half-line).
GeomSet parse_set(const std::string& text);

}  // namespace nonlocal
