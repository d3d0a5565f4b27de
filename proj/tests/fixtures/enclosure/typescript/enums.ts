export enum Level {
  Low = 1,
  High = 2,
}

export const enum Flag {
  On,
  Off,
}

export namespace Config {
  export const defaults = { level: Level.Low };

  export function merge(a: object, b: object): object {
    return { ...a, ...b };
  }
}
