/* Copyright (c) 2026 The SCTTS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the speed-controllable text-to-speech toolkit. Every
 * operation returns a status code; on failure, sctts_last_error() holds a
 * human-readable message for the calling thread. Configuration and request
 * payloads are JSON documents; unknown keys are rejected.
 */

#ifndef SCTTS_SCTTS_H_
#define SCTTS_SCTTS_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sctts_status {
  SCTTS_OK = 0,
  SCTTS_INVALID_ARGUMENT = 1,
  SCTTS_IO_ERROR = 2,
  SCTTS_PARSE_ERROR = 3,
  SCTTS_DOMAIN_ERROR = 4,
  SCTTS_INTERNAL_ERROR = 5
} sctts_status;

/* Library version as "major.minor.patch". */
const char* sctts_version(void);

/* Message of the calling thread's most recent failure; empty if none. The
 * pointer stays valid until the thread's next failing call. */
const char* sctts_last_error(void);

/* The default configuration document with every key present. The caller
 * copies at most `cap` bytes (including the terminator) into `out`. */
sctts_status sctts_default_config(char* out, size_t cap);

/* Generates the synthetic corpus described by the config's "corpus" and
 * "features" sections into out_dir: one WAV per utterance plus
 * manifest.jsonl with ground-truth metadata. */
sctts_status sctts_corpus_synth(const char* config_json, const char* out_dir);

/* Extracts normalized mel features for every manifest utterance into
 * out_dir as <id>.mel. */
sctts_status sctts_extract_features(const char* config_json,
                                    const char* manifest_path,
                                    const char* out_dir);

/* Trains on the manifest corpus. Writes train_log.csv, optional periodic
 * checkpoints, and the final checkpoint under out_dir/final. */
sctts_status sctts_train(const char* config_json, const char* manifest_path,
                         const char* out_dir);

/* A loaded checkpoint. Load once, synthesize many times; concurrent
 * synthesize calls on one model are safe. */
typedef struct sctts_model sctts_model;

sctts_status sctts_model_load(const char* checkpoint_dir, sctts_model** out);
void sctts_model_free(sctts_model* model);

/* Summary of the loaded model as JSON: mean_r, std_r, n, lambda, step,
 * use_gst, vocab_size, mel_bins, sample_rate. */
sctts_status sctts_model_info(const sctts_model* model, char* out, size_t cap);

/* Synthesizes one utterance. request_json keys: text (required); sr or
 * length_scale (optional, exclusive); reference (WAV path) or token_weights
 * (rows on the simplex) for style models; monotonic_attention;
 * max_frames_margin. Writes a 16-bit PCM WAV; optionally dumps the mel
 * (MEL0 container) and the attention matrix (CSV) when paths are given. */
sctts_status sctts_synthesize(const sctts_model* model, const char* request_json,
                              const char* wav_path, const char* mel_path,
                              const char* attention_csv_path);

/* Rate vs mean voiced F0 for every corpus utterance; writes
 * utt_id,sr,mean_f0 rows. Skipped (silent) utterances and the Pearson
 * correlation are reported through summary_out when given. */
sctts_status sctts_analyze_scatter(const char* config_json,
                                   const char* manifest_path,
                                   const char* out_csv, char* summary_out,
                                   size_t summary_cap);

/* Mean voiced F0 of synthesized speech across a rate grid. params_json:
 * texts (required array); grid (optional; default spans 0.6 to 1.4 times the
 * corpus mean rate); style and attention keys as in sctts_synthesize.
 * Writes sr,mean_f0,ci95,n rows. */
sctts_status sctts_analyze_f0sr(const sctts_model* model,
                                const char* params_json, const char* out_csv);

/* Requested vs achieved rate across length scales. params_json: texts
 * (required); length_scales (optional; default 0.7, 1.0, 1.5); style and
 * attention keys as in sctts_synthesize. Writes
 * text_id,requested_r,achieved_r,rel_error rows; summary_out receives the
 * monotone-text fraction and median relative error when given. */
sctts_status sctts_analyze_length(const sctts_model* model,
                                  const char* params_json, const char* out_csv,
                                  char* summary_out, size_t summary_cap);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SCTTS_SCTTS_H_ */
