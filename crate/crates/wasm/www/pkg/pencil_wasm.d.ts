/* tslint:disable */
/* eslint-disable */

/**
 * Eigenvalues of the recovered potentials for `1 ≤ |n| ≤ n_max`, as
 * `[n, Re λ, Im λ]` triples.
 */
export function forward_eigenvalues(delta: number, n_grid: number, n_max: number): Float64Array;

/**
 * Recovered potentials for split parameter `delta` (`0` gives the double
 * eigenvalue). Layout: five blocks of `n_grid + 1` values:
 * `x, Re q1, Im q1, Re ∫q0, Im ∫q0`.
 */
export function recovered_potentials(delta: number, n_grid: number): Float64Array;

/**
 * `[Re λ1, Im λ1, Re λ−1, Im λ−1, Re M1, Im M1, Re M−1, Im M−1, d1, d0, contour metric]`.
 */
export function split_summary(delta: number, n_grid: number, contour_radius: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly forward_eigenvalues: (a: number, b: number, c: number) => [number, number, number, number];
    readonly recovered_potentials: (a: number, b: number) => [number, number, number, number];
    readonly split_summary: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
