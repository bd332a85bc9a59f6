/* tslint:disable */
/* eslint-disable */

export class WebModel {
    free(): void;
    [Symbol.dispose](): void;
    crossings(): number;
    curveLength(): number;
    energy(): number;
    /**
     * `[re, im]` of the hypothesis at a point of the closed disk.
     */
    eval(re: number, im: number): Float64Array;
    /**
     * Flip radius, or `undefined` when there is none within the budget.
     */
    flipRadius(re: number, im: number): number | undefined;
    constructor();
    render(style: string, size: number, log_magnitude: boolean): Uint8Array;
    static train(n: number, k: number, c: number, robust: boolean): WebModel;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_webmodel_free: (a: number, b: number) => void;
    readonly webmodel_crossings: (a: number) => number;
    readonly webmodel_curveLength: (a: number) => number;
    readonly webmodel_energy: (a: number) => number;
    readonly webmodel_eval: (a: number, b: number, c: number) => [number, number, number, number];
    readonly webmodel_flipRadius: (a: number, b: number, c: number) => [number, number, number, number];
    readonly webmodel_new: () => [number, number, number];
    readonly webmodel_render: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly webmodel_train: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
