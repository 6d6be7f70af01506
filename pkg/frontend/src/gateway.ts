/**
 * Binary RPC client: one packet per round trip, positional arguments,
 * onResult/onStatus correlation by response URI.  Calls are plain
 * promises, so any number may be in flight at once.
 */

import {
  AMF_CONTENT_TYPE,
  AmfValue,
  decodePacket,
  encodePacket,
} from "./amf3.js";

export interface HttpReply {
  status: number;
  body: Uint8Array;
}

export type PostFn = (body: Uint8Array) => Promise<HttpReply>;

export class FaultError extends Error {
  constructor(
    readonly code: string,
    readonly faultMessage: string,
    readonly details: string | null,
  ) {
    super(`${code}: ${faultMessage}`);
    this.name = "FaultError";
  }
}

export class TransportError extends Error {
  constructor(readonly status: number) {
    super(`gateway answered HTTP ${status}`);
    this.name = "TransportError";
  }
}

export type CallOutcome =
  | { kind: "result"; body: AmfValue }
  | { kind: "fault"; fault: FaultError };

function toFault(body: AmfValue): FaultError {
  const record = (typeof body === "object" && body !== null ? body : {}) as Record<
    string,
    AmfValue
  >;
  return new FaultError(
    typeof record.code === "string" ? record.code : "internal.error",
    typeof record.message === "string" ? record.message : "malformed fault",
    typeof record.details === "string" ? record.details : null,
  );
}

export class GatewayClient {
  private nextResponseId = 1;

  constructor(private readonly post: PostFn) {}

  /** POST one packet carrying several calls; outcomes in call order. */
  async callMany(calls: Array<[string, AmfValue[]]>): Promise<CallOutcome[]> {
    const uris = calls.map(() => `/${this.nextResponseId++}`);
    const packet = encodePacket({
      version: 3,
      headers: [],
      messages: calls.map(([target, args], i) => ({
        targetUri: target,
        responseUri: uris[i],
        body: args,
      })),
    });
    const reply = await this.post(packet);
    if (reply.status !== 200) throw new TransportError(reply.status);
    const response = decodePacket(reply.body);
    if (response.messages.length !== calls.length) {
      throw new Error(`expected ${calls.length} reply messages, got ${response.messages.length}`);
    }
    return response.messages.map((message, i) => {
      if (message.targetUri === `${uris[i]}/onResult`) {
        return { kind: "result", body: message.body };
      }
      if (message.targetUri === `${uris[i]}/onStatus`) {
        return { kind: "fault", fault: toFault(message.body) };
      }
      throw new Error(`uncorrelated reply target '${message.targetUri}'`);
    });
  }

  async call(target: string, ...args: AmfValue[]): Promise<AmfValue> {
    const [outcome] = await this.callMany([[target, args]]);
    if (outcome.kind === "fault") throw outcome.fault;
    return outcome.body;
  }
}

/** Default transport for browsers and node 18+. */
export function fetchPost(url: string): PostFn {
  return async (body: Uint8Array) => {
    const response = await fetch(url, {
      method: "POST",
      headers: { "Content-Type": AMF_CONTENT_TYPE },
      body: body as unknown as BodyInit,
    });
    return { status: response.status, body: new Uint8Array(await response.arrayBuffer()) };
  };
}
