#include "ebem/core.hpp"

namespace ebem {

std::pair<double, double> medium_wavenumbers(const ElasticMedium& m)
{
    return {m.kp(), m.ks()};
}

}  // namespace ebem
