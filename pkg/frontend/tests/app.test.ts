import { afterEach, describe, expect, it, vi } from 'vitest'

import { ApiClient } from '../src/api.js'
import { App } from '../src/app.js'
import { buildDom, drag, wavFileStub } from './helpers.js'

const UPLOAD_BODY = {
  id: 'abc',
  duration_s: 2.0,
  sample_rate: 44100,
  spectrogram_width: 200,
  spectrogram_height: 128,
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  })
}



afterEach(() => {
  vi.unstubAllGlobals()
})

describe('App', () => {
  it('uploads and sizes the view at one pixel per column', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(UPLOAD_BODY))
    vi.stubGlobal('fetch', fetchMock)
    const app = new App(new ApiClient('http://svc'), buildDom())
    await app.uploadAndShow(wavFileStub())
    expect(app.currentUpload?.id).toBe('abc')
    const image = document.getElementById('spectrogram') as HTMLImageElement
    expect(image.style.width).toBe('200px')
    expect(image.src).toContain('/audio/abc/spectrogram')
  })

  it('surfaces server 415 errors in the status banner', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn().mockResolvedValue(jsonResponse({ error: 'cannot decode WAV body' }, 415)),
    )
    const app = new App(new ApiClient('http://svc'), buildDom())
    await app.uploadAndShow(wavFileStub())
    const status = document.getElementById('status') as HTMLElement
    expect(status.classList.contains('error')).toBe(true)
    expect(status.textContent).toContain('415')
    expect(app.currentUpload).toBeNull()
  })

  it('re-upload replaces the previous clip and clears the overlay', async () => {
    const second = { ...UPLOAD_BODY, id: 'def', spectrogram_width: 120 }
    const fetchMock = vi
      .fn()
      .mockResolvedValueOnce(jsonResponse(UPLOAD_BODY))
      .mockResolvedValueOnce(jsonResponse(second))
    vi.stubGlobal('fetch', fetchMock)
    const elements = buildDom()
    const app = new App(new ApiClient('http://svc'), elements)
    await app.uploadAndShow(wavFileStub())
    elements.overlayLayer.appendChild(document.createElement('span'))
    await app.uploadAndShow(wavFileStub())
    expect(app.currentUpload?.id).toBe('def')
    expect(elements.image.style.width).toBe('120px')
    expect(elements.overlayLayer.children).toHaveLength(0)
  })

  it('analyzes the dragged selection and renders the overlay', async () => {
    const analysisBody = {
      id: 'abc',
      model: 'svm',
      start_s: 0.2,
      end_s: 1.2,
      width: 100,
      ticks: [
        { x: 0, label: 1, confidence: 0.7 },
        { x: 10, label: 1, confidence: 0.75 },
      ],
      tick_lines: ['0,1,0.7', '10,1,0.75'],
      shift_markers: [],
      annotated_png: '/analyses/k.png',
    }
    const fetchMock = vi
      .fn()
      .mockResolvedValueOnce(jsonResponse(UPLOAD_BODY))
      .mockResolvedValueOnce(jsonResponse(analysisBody))
    vi.stubGlobal('fetch', fetchMock)
    const elements = buildDom()
    const app = new App(new ApiClient('http://svc'), elements)
    await app.uploadAndShow(wavFileStub())
    drag(elements.view, 20, 120)
    expect(app.currentSelection?.start_s).toBeCloseTo(0.2)
    await app.runAnalysis()

    const sent = JSON.parse((fetchMock.mock.calls[1]![1] as RequestInit).body as string)
    expect(sent.start_s).toBeCloseTo(0.2)
    expect(sent.end_s).toBeCloseTo(1.2)
    expect(sent.model).toBe('svm')

    const ticks = app.overlay.tickElements
    // overlay anchored at the selection start: 0.2 s * 100 col/s = 20 px
    expect(ticks.map((t) => t.style.left)).toEqual(['20px', '30px'])
  })

  it('clears the overlay and shows a banner when analysis fails', async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValueOnce(jsonResponse(UPLOAD_BODY))
      .mockResolvedValueOnce(jsonResponse({ error: 'cnn model not loaded' }, 409))
    vi.stubGlobal('fetch', fetchMock)
    const elements = buildDom()
    const app = new App(new ApiClient('http://svc'), elements)
    await app.uploadAndShow(wavFileStub())
    elements.overlayLayer.appendChild(document.createElement('span'))
    await app.runAnalysis()
    expect(elements.overlayLayer.children).toHaveLength(0)
    expect(elements.status.textContent).toContain('409')
  })

  it('discards stale analysis responses superseded by a newer request', async () => {
    const tick = (label: number) => [{ x: 0, label, confidence: 0.9 }]
    const slowBody = {
      id: 'abc', model: 'svm', start_s: 0, end_s: 2, width: 10,
      ticks: tick(0), tick_lines: ['0,0,0.9'], shift_markers: [], annotated_png: '/a.png',
    }
    const fastBody = { ...slowBody, ticks: tick(3), tick_lines: ['0,3,0.9'] }

    let resolveSlow!: (r: Response) => void
    const slow = new Promise<Response>((resolve) => (resolveSlow = resolve))
    const fetchMock = vi
      .fn()
      .mockResolvedValueOnce(jsonResponse(UPLOAD_BODY))
      .mockReturnValueOnce(slow)
      .mockResolvedValueOnce(jsonResponse(fastBody))
    vi.stubGlobal('fetch', fetchMock)

    const elements = buildDom()
    const app = new App(new ApiClient('http://svc'), elements)
    await app.uploadAndShow(wavFileStub())

    const first = app.runAnalysis() // hangs on `slow`
    const second = app.runAnalysis() // completes immediately
    await second
    resolveSlow(jsonResponse(slowBody))
    await first

    // the stale (first) response must not overwrite the newer overlay
    expect(app.overlay.tickElements.map((t) => t.textContent)).toEqual(['3'])
  })
})
