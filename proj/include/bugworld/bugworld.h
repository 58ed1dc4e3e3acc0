#ifndef BUGWORLD_BUGWORLD_H
#define BUGWORLD_BUGWORLD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BW_API __declspec(dllexport)
#else
#define BW_API __attribute__((visibility("default")))
#endif

typedef enum bw_status {
  BW_OK = 0,
  BW_ERR_UNKNOWN_ENV = 1,
  BW_ERR_UNKNOWN_BUG = 2,
  BW_ERR_UNKNOWN_BEHAVIOUR = 3,
  BW_ERR_UNKNOWN_CMD = 4,
  BW_ERR_EPISODE_DONE = 5,
  BW_ERR_NOT_RESET = 6,
  BW_ERR_NO_ENV = 7,
  BW_ERR_MALFORMED = 8,
  BW_ERR_TARGET_NOT_FOUND = 9,
  BW_ERR_INVALID_ACTION = 10,
  BW_ERR_BEHAVIOUR_EXTERNAL = 11,
  BW_ERR_BAD_ARGUMENT = 12,
  BW_ERR_IO = 13,
  BW_ERR_INTERNAL = 99
} bw_status;

/* Wire name of a status, e.g. "UNKNOWN_BUG". */
BW_API const char* bw_status_name(bw_status status);
/* Detail of the last failure on the calling thread; "" if none. */
BW_API const char* bw_last_error(void);
BW_API const char* bw_version(void);

/* Strings returned through char** are owned by the caller. */
BW_API void bw_string_free(char* s);

/* ---- environments ---- */

typedef struct bw_env bw_env;

typedef struct bw_step_info {
  uint64_t step;
  int done;
  int stuck;
  int out_of_bounds;
  int crash;
  int invalid_action_applied;
  int has_observation; /* 0 after a crash */
} bw_step_info;

/* config_json may be NULL; keys: width, height, resolution, seed,
   maze_width, maze_height, step_limit, allowed_actions. */
BW_API bw_status bw_env_create(const char* env_id, const char* config_json, bw_env** out);
BW_API void bw_env_destroy(bw_env* env);

BW_API bw_status bw_env_reset(bw_env* env, uint64_t seed);
BW_API bw_status bw_env_step(bw_env* env, int action, bw_step_info* info);

/* Latest observation. Pointers stay valid until the next reset/step. */
BW_API bw_status bw_env_frame(const bw_env* env, const uint8_t** rgb, int* width, int* height);
BW_API bw_status bw_env_mask(const bw_env* env, const uint8_t** rgb, int* width, int* height);
BW_API bw_status bw_env_state(const bw_env* env, double state[7]);
/* JSON step info of the latest observation. */
BW_API bw_status bw_env_info_json(const bw_env* env, char** out);

/* params_json may be NULL, else an object of numbers. */
BW_API bw_status bw_env_set_bug(bw_env* env, const char* name, int enabled, const char* params_json);
BW_API bw_status bw_env_list_bugs_json(const bw_env* env, char** out);
BW_API bw_status bw_env_spec_json(const bw_env* env, char** out);

BW_API bw_status bw_env_set_behaviour(bw_env* env, const char* name);
BW_API bw_status bw_env_act(bw_env* env, int* action);
BW_API bw_status bw_env_set_agent_pose(bw_env* env, double x, double y, double z, double yaw, double pitch);

/* ---- server ---- */

typedef struct bw_server bw_server;

typedef struct bw_server_options {
  const char* host;        /* NULL: 0.0.0.0 */
  int port;                /* 0: any free port */
  const char* env_id;      /* default for "make"; NULL: Maze-v0 */
  const char* config_json; /* defaults for "make"; may be NULL */
  const char* viewer_dir;  /* static files; NULL disables */
} bw_server_options;

/* Flag value if has_flag, else BUGWORLD_PORT, else 8723. */
BW_API bw_status bw_resolve_port(int has_flag, int flag, int* port);

BW_API bw_status bw_server_create(const bw_server_options* options, bw_server** out);
BW_API int bw_server_port(const bw_server* server);
/* Blocks until bw_server_stop. */
BW_API bw_status bw_server_run(bw_server* server);
BW_API void bw_server_stop(bw_server* server);
BW_API void bw_server_destroy(bw_server* server);

/* ---- datasets ---- */

/* options_json: {"env_id", "config", "behaviour", "steps",
   "schedule": ["NAME@STEP[:on|:off][,k=v...]", ...], "out_dir"}.
   On success *manifest_json receives the manifest (may be NULL). */
BW_API bw_status bw_dataset_generate(const char* options_json, char** manifest_json);
/* *report_json receives an array of {"kind", "detail"}; empty when valid. */
BW_API bw_status bw_dataset_validate(const char* dir, char** report_json);

typedef struct bw_dataset bw_dataset;
BW_API bw_status bw_dataset_open(const char* dir, bw_dataset** out);
BW_API void bw_dataset_close(bw_dataset* ds);
BW_API size_t bw_dataset_size(const bw_dataset* ds);
/* Loads item k; buffers stay valid until the next bw_dataset_load. */
BW_API bw_status bw_dataset_load(bw_dataset* ds, size_t k);
BW_API bw_status bw_dataset_frame(const bw_dataset* ds, const uint8_t** rgb, int* width, int* height);
BW_API bw_status bw_dataset_mask(const bw_dataset* ds, const uint8_t** rgb, int* width, int* height);
BW_API bw_status bw_dataset_row_json(const bw_dataset* ds, char** out);

#ifdef __cplusplus
}
#endif

#endif
