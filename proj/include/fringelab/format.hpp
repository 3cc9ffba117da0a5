#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>

#include "errors.hpp"

namespace fringelab {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
	char buf[64];
	const auto res = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
	double v = 0.0;
	const auto *end = s.data() + s.size();
	const auto res = std::from_chars(s.data(), end, v);
	if (res.ec != std::errc{} || res.ptr != end)
		throw ConfigError("not a number: '" + std::string(s) + "'");
	return v;
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
	std::uint64_t h = 0xcbf29ce484222325ULL;
	for (unsigned char c : bytes) {
		h ^= c;
		h *= 0x100000001b3ULL;
	}
	return h;
}

inline std::string hex64(std::uint64_t v) {
	static constexpr char digits[] = "0123456789abcdef";
	std::string s(16, '0');
	for (int i = 15; i >= 0; --i, v >>= 4)
		s[static_cast<std::size_t>(i)] = digits[v & 0xf];
	return s;
}

} // namespace fringelab
