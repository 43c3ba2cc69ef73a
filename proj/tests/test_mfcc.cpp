#include "soundtex/error.hpp"
#include "soundtex/mfcc.hpp"

#include "testing/oracles.hpp"
#include "testing/signals.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace soundtex;

TEST_CASE("Frame count follows the framing arithmetic")
{
	CHECK(mfcc_frame_count(37500, 256, 128) == 291);
	CHECK(mfcc_frame_count(256, 256, 128) == 1);
	CHECK(mfcc_frame_count(383, 256, 128) == 1);
	CHECK(mfcc_frame_count(384, 256, 128) == 2);
	CHECK_THROWS_AS(mfcc_frame_count(255, 256, 128), ParameterError);
}

TEST_CASE("3.75 s clip gives a 20 x 291 matrix")
{
	const Waveform w(testing::white_noise(60000, 3), 16000);
	const MfccMatrix m = mfcc_matrix(w);
	CHECK(m.coeffs.rows() == 20);
	CHECK(m.n_frames() == 291);
	CHECK(m.frame_hop == Catch::Approx(0.0128));
	CHECK(flatten(m).size() == 5820);
	for (double v : m.coeffs.data())
		REQUIRE(std::isfinite(v));
}

TEST_CASE("Frame count holds for several clip lengths")
{
	for (double seconds : {0.0256, 0.5, 1.0, 2.0, 3.75})
	{
		const auto n16 = static_cast<std::size_t>(std::llround(seconds * 16000));
		const Waveform w(testing::white_noise(n16, 1), 16000);
		const auto n10 = static_cast<std::size_t>(std::llround(seconds * 10000));
		CHECK(mfcc_matrix(w).n_frames() == (n10 - 256) / 128 + 1);
	}
}

TEST_CASE("Silence yields identical frames")
{
	const Waveform w(std::vector<double>(16000, 0.0), 16000);
	const MfccMatrix m = mfcc_matrix(w);
	for (std::size_t i = 0; i < m.coeffs.rows(); ++i)
	{
		for (std::size_t f = 1; f < m.n_frames(); ++f)
			REQUIRE(m.coeffs(i, f) == m.coeffs(i, 0));
		REQUIRE(std::isfinite(m.coeffs(i, 0)));
	}
}

TEST_CASE("Cepstrum matches the direct double sum for a 1 kHz tone")
{
	const Waveform w(testing::tone(1000.0, 3.75, 16000, 0.5), 16000);
	const MfccMatrix m = mfcc_matrix(w);
	double worst = 0.0;
	for (std::size_t f = 0; f < m.n_frames(); ++f)
	{
		std::vector<double> x(20);
		for (std::size_t k = 0; k < 20; ++k)
			x[k] = m.log_energies(k, f);
		for (std::size_t i = 1; i <= 20; ++i)
			worst = std::max(worst, std::abs(m.coeffs(i - 1, f) - oracle::mfcc_coefficient(x, i)));
	}
	CHECK(worst < 1e-9);
}

TEST_CASE("Cosine transform of a unit vector is the cosine column")
{
	const Matrix basis = cepstral_basis(20, 20);
	for (std::size_t k = 1; k <= 20; ++k)
	{
		std::vector<double> unit(20, 0.0);
		unit[k - 1] = 1.0;
		const auto c = cepstrum(unit, basis);
		for (std::size_t i = 1; i <= 20; ++i)
			REQUIRE(std::abs(c[i - 1] - std::cos(static_cast<double>(i) * (static_cast<double>(k) - 0.5) * std::numbers::pi / 20.0)) < 1e-12);
	}
	CHECK_THROWS_AS(cepstrum(std::vector<double>(19, 0.0), basis), ParameterError);
}

TEST_CASE("Mel filterbank shape")
{
	const Matrix mel = mel_filterbank(20, 256, 10000, 5000);
	REQUIRE(mel.rows() == 20);
	REQUIRE(mel.cols() == 129);
	for (std::size_t k = 0; k < 20; ++k)
	{
		const auto row = mel.row(k);
		const double peak = *std::max_element(row.begin(), row.end());
		CHECK(peak > 0.0);
		CHECK(peak <= 1.0);
	}
	// Triangles overlap by half: between the first and last centres, adjacent
	// weights sum to one.
	const auto mel_to_hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
	const double top = 2595.0 * std::log10(1.0 + 5000.0 / 700.0);
	const double first_centre = mel_to_hz(top / 21.0);
	const double last_centre = mel_to_hz(top * 20.0 / 21.0);
	for (std::size_t b = 1; b < 128; ++b)
	{
		const double hz = b * 10000.0 / 256.0;
		if (hz < first_centre || hz > last_centre)
			continue;
		double sum = 0.0;
		for (std::size_t k = 0; k < 20; ++k)
			sum += mel(k, b);
		REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));
	}
}

TEST_CASE("A tone lights up the mel channel that contains it")
{
	const Waveform w(testing::tone(1000.0, 1.0, 16000, 0.5), 16000);
	const MfccMatrix m = mfcc_matrix(w);
	const Matrix mel = mel_filterbank(20, 256, 10000, 5000);
	const std::size_t bin = static_cast<std::size_t>(std::llround(1000.0 * 256 / 10000.0));
	std::size_t expected = 0;
	for (std::size_t k = 1; k < 20; ++k)
		if (mel(k, bin) > mel(expected, bin))
			expected = k;
	std::size_t loudest = 0;
	for (std::size_t k = 1; k < 20; ++k)
		if (m.log_energies(k, 10) > m.log_energies(loudest, 10))
			loudest = k;
	CHECK(loudest == expected);
}

TEST_CASE("flatten is frame-major and invertible")
{
	const Waveform w(testing::white_noise(20000, 8), 16000);
	const MfccMatrix m = mfcc_matrix(w);
	const auto flat = flatten(m);
	CHECK(flat[0] == m.coeffs(0, 0));
	CHECK(flat[1] == m.coeffs(1, 0));
	CHECK(flat[20] == m.coeffs(0, 1));
	CHECK(unflatten(flat, 20).coeffs == m.coeffs);

	MfccMatrix single;
	single.coeffs = Matrix(20, 1);
	for (std::size_t i = 0; i < 20; ++i)
		single.coeffs(i, 0) = static_cast<double>(i) * 0.5;
	const auto column = flatten(single);
	REQUIRE(column.size() == 20);
	for (std::size_t i = 0; i < 20; ++i)
		CHECK(column[i] == single.coeffs(i, 0));

	CHECK_THROWS_AS(unflatten(std::vector<double>(21, 0.0), 20), ParameterError);
}

TEST_CASE("Clips shorter than a window are rejected")
{
	const Waveform w(std::vector<double>(300, 0.1), 16000);
	CHECK_THROWS_AS(mfcc_matrix(w), ParameterError);
}

TEST_CASE("MFCC extraction is deterministic")
{
	const Waveform w(testing::white_noise(60000, 12), 16000);
	CHECK(mfcc_matrix(w).coeffs == mfcc_matrix(w).coeffs);
}
