/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_webmodel_free: (a: number, b: number) => void;
export const webmodel_crossings: (a: number) => number;
export const webmodel_curveLength: (a: number) => number;
export const webmodel_energy: (a: number) => number;
export const webmodel_eval: (a: number, b: number, c: number) => [number, number, number, number];
export const webmodel_flipRadius: (a: number, b: number, c: number) => [number, number, number, number];
export const webmodel_new: () => [number, number, number];
export const webmodel_render: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const webmodel_train: (a: number, b: number, c: number, d: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
