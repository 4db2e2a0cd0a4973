import { ApiClient } from './api.js'
import { App, type AppElements } from './app.js'

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id)
  if (!el) throw new Error(`missing #${id}`)
  return el as T
}

document.addEventListener('DOMContentLoaded', () => {
  const elements: AppElements = {
    fileInput: byId<HTMLInputElement>('fileInput'),
    modelSelect: byId<HTMLSelectElement>('modelSelect'),
    analyzeButton: byId<HTMLButtonElement>('analyzeButton'),
    view: byId('view'),
    image: byId<HTMLImageElement>('spectrogram'),
    overlayLayer: byId('overlay'),
    status: byId('status'),
    legend: byId('legend'),
  }
  const baseUrl = new URLSearchParams(window.location.search).get('api') ?? 'http://127.0.0.1:8000'
  new App(new ApiClient(baseUrl), elements)
})
