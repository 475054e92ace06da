// Small usage sample: gain breakdown and capacity of the default soil link over distance.
#include <cstdio>

#include "mic/mic.hpp"

int main() {
    using namespace mic;
    const LinkSpec base = default_link();
    std::printf("%8s %12s %12s %12s %10s %10s\n", "d [m]", "space", "eddy", "total", "B [Hz]", "C [bit/s]");
    for (double d : {5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0}) {
        const LinkSpec l = with_distance(base, d);
        const auto g = link_gain(l, l.carrier());
        const auto c = capacity(l);
        std::printf("%8.1f %12.4g %12.4g %12.4g %10.1f %10.1f\n", d, g.space, g.eddy, g.total, c.bandwidth.value,
                    c.value);
    }
}
