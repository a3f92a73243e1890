#pragma once

// Umbrella header for the noiselab speech-enhancement data toolkit.

#include "noiselab/augment.hpp"
#include "noiselab/batch.hpp"
#include "noiselab/biquad.hpp"
#include "noiselab/core.hpp"
#include "noiselab/corpus.hpp"
#include "noiselab/enhance.hpp"
#include "noiselab/fft.hpp"
#include "noiselab/loss.hpp"
#include "noiselab/manifest.hpp"
#include "noiselab/metrics.hpp"
#include "noiselab/model_io.hpp"
#include "noiselab/rng.hpp"
#include "noiselab/stft.hpp"
#include "noiselab/synth.hpp"
#include "noiselab/toy_model.hpp"
#include "noiselab/vad.hpp"
#include "noiselab/wav_io.hpp"
#include "noiselab/waveform.hpp"
