// Shared test utilities: DOM scaffolding, synthetic WAV bytes, drag gestures.

import type { AppElements } from '../src/app.js'

export function buildDom(): AppElements {
  document.body.innerHTML = `
    <input id="fileInput" type="file" />
    <select id="modelSelect">
      <option value="svm" selected>SVM</option>
      <option value="cnn">CNN</option>
    </select>
    <button id="analyzeButton"></button>
    <div id="status"></div>
    <div id="view"><img id="spectrogram" /><div id="overlay"></div></div>
    <div id="legend"></div>
  `
  return {
    fileInput: document.getElementById('fileInput') as HTMLInputElement,
    modelSelect: document.getElementById('modelSelect') as HTMLSelectElement,
    analyzeButton: document.getElementById('analyzeButton') as HTMLButtonElement,
    view: document.getElementById('view') as HTMLElement,
    image: document.getElementById('spectrogram') as HTMLImageElement,
    overlayLayer: document.getElementById('overlay') as HTMLElement,
    status: document.getElementById('status') as HTMLElement,
    legend: document.getElementById('legend') as HTMLElement,
  }
}

/** Mono 16-bit PCM WAV bytes for a sine tone. */
export function sineWav(freqHz = 440, seconds = 1.0, sampleRate = 44100): Uint8Array {
  const n = Math.round(seconds * sampleRate)
  const payload = new Int16Array(n)
  for (let i = 0; i < n; i++) {
    payload[i] = Math.round(0.4 * 32767 * Math.sin((2 * Math.PI * freqHz * i) / sampleRate))
  }
  const bytes = new Uint8Array(44 + payload.byteLength)
  const view = new DataView(bytes.buffer)
  const ascii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) bytes[offset + i] = text.charCodeAt(i)
  }
  ascii(0, 'RIFF')
  view.setUint32(4, 36 + payload.byteLength, true)
  ascii(8, 'WAVE')
  ascii(12, 'fmt ')
  view.setUint32(16, 16, true)
  view.setUint16(20, 1, true) // PCM
  view.setUint16(22, 1, true) // mono
  view.setUint32(24, sampleRate, true)
  view.setUint32(28, sampleRate * 2, true)
  view.setUint16(32, 2, true)
  view.setUint16(34, 16, true)
  ascii(36, 'data')
  view.setUint32(40, payload.byteLength, true)
  bytes.set(new Uint8Array(payload.buffer), 44)
  return bytes
}

/** jsdom's Blob lacks arrayBuffer(); tests hand the app a file-like stub. */
export function wavFileStub(bytes?: Uint8Array): File {
  const data = bytes ?? sineWav(440, 0.5)
  const buffer = data.buffer.slice(data.byteOffset, data.byteOffset + data.byteLength)
  return { arrayBuffer: async () => buffer } as unknown as File
}

export function mouse(el: HTMLElement, type: string, clientX: number): void {
  el.dispatchEvent(new MouseEvent(type, { clientX, bubbles: true }))
}

export function drag(el: HTMLElement, fromPx: number, toPx: number): void {
  mouse(el, 'mousedown', fromPx)
  mouse(el, 'mousemove', Math.round((fromPx + toPx) / 2))
  mouse(el, 'mouseup', toPx)
}
