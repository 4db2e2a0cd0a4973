// Typed client for the analysis service. The UI talks only to these endpoints.

export interface UploadInfo {
  id: string
  duration_s: number
  sample_rate: number
  spectrogram_width: number
  spectrogram_height: number
}

export interface TickInfo {
  x: number
  label: number
  confidence: number
}

export interface AnalysisResponse {
  id: string
  model: string
  start_s: number
  end_s: number
  width: number
  ticks: TickInfo[]
  tick_lines: string[]
  shift_markers: number[]
  annotated_png: string
}

export type ModelKind = 'svm' | 'cnn'

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message)
  }
}

async function errorMessage(res: Response): Promise<string> {
  try {
    const body = (await res.json()) as { error?: string }
    if (body.error) return `${res.status}: ${body.error}`
  } catch {
    /* non-JSON body */
  }
  return `${res.status}: request failed`
}

export class ApiClient {
  constructor(readonly baseUrl: string = '') {}

  async uploadAudio(wavBytes: ArrayBuffer | Uint8Array): Promise<UploadInfo> {
    const body =
      wavBytes instanceof Uint8Array
        ? (wavBytes.buffer.slice(
            wavBytes.byteOffset,
            wavBytes.byteOffset + wavBytes.byteLength,
          ) as ArrayBuffer)
        : wavBytes
    const res = await fetch(`${this.baseUrl}/audio`, { method: 'POST', body })
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res))
    return (await res.json()) as UploadInfo
  }

  spectrogramUrl(id: string, startS?: number, endS?: number): string {
    const params = new URLSearchParams()
    if (startS !== undefined) params.set('start_s', String(startS))
    if (endS !== undefined) params.set('end_s', String(endS))
    const query = params.toString()
    return `${this.baseUrl}/audio/${id}/spectrogram${query ? '?' + query : ''}`
  }

  async analyze(
    id: string,
    startS: number,
    endS: number,
    model: ModelKind,
  ): Promise<AnalysisResponse> {
    const res = await fetch(`${this.baseUrl}/analyze`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ id, start_s: startS, end_s: endS, model }),
    })
    if (!res.ok) throw new ApiError(res.status, await errorMessage(res))
    return (await res.json()) as AnalysisResponse
  }
}
