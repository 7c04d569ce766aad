#ifndef INDIRECT_SIGN_HPP
#define INDIRECT_SIGN_HPP

#include <ostream>

namespace indirect
{

enum class Sign : int
{
    Negative = -1,
    Zero = 0,
    Positive = 1,
};

inline constexpr Sign operator-(Sign s) noexcept
{
    return static_cast<Sign>(-static_cast<int>(s));
}

inline constexpr Sign operator*(Sign a, Sign b) noexcept
{
    return static_cast<Sign>(static_cast<int>(a) * static_cast<int>(b));
}

template <typename T>
constexpr Sign sign_of(T v) noexcept
{
    return v > T(0) ? Sign::Positive : (v < T(0) ? Sign::Negative : Sign::Zero);
}

inline std::ostream& operator<<(std::ostream& os, Sign s)
{
    switch (s)
    {
    case Sign::Negative: return os << "Negative";
    case Sign::Zero: return os << "Zero";
    case Sign::Positive: return os << "Positive";
    }
    return os;
}

} // namespace indirect

#endif
