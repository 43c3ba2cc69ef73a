#pragma once

#include "soundtex/dsp.hpp"

#include <filesystem>

namespace soundtex
{
	enum class WavEncoding
	{
		Pcm16,
		Pcm24,
		Float32,
	};

	/// Decodes RIFF/WAVE files holding 8/16/24/32-bit integer PCM or 32/64-bit
	/// float samples (plain or WAVE_FORMAT_EXTENSIBLE). Channels are averaged to
	/// mono and integer PCM is scaled to [-1, 1).
	Waveform read_wav(const std::filesystem::path& path);

	/// Writes a mono file; PCM encodings clip to [-1, 1).
	void write_wav(const std::filesystem::path& path, const Waveform& w, WavEncoding encoding = WavEncoding::Pcm16);
} // namespace soundtex
